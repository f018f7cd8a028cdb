//! Dispersive decay of the continuous-spectrum part and the scan of the closed-form I_a integral.
use winter_nls::linear::{
    dispersive_check, gaussian_field, lemma1_bound_check, propagate_continuum, Backend, DispersiveOptions, ModelParams,
};

fn main() -> winter_nls::Result<()> {
    let params = ModelParams::new(1.0, 2.0)?;
    let opts = DispersiveOptions { l: 400.0, dx: 0.05, dt: 0.02, times: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0] };
    let psi0 = gaussian_field(&params, opts.l, opts.dx, 1.0, 0.5)?;
    let report = dispersive_check(&psi0, &params, &opts)?;
    println!("{:>8} {:>14} {:>14}", "t", "sup|psi|", "sqrt(t) sup");
    for r in &report.rows {
        println!("{:>8.3} {:>14.6e} {:>14.6e}", r.t, r.sup_norm, r.sqrt_t_times_sup);
    }
    println!("log-log slope {:.4}, empirical constant {:.4}", report.loglog_slope, report.empirical_constant);

    let small = gaussian_field(&params, 20.0, 0.02, 3.0, 0.5)?;
    let pde = propagate_continuum(&small, 0.5, &params, Backend::Pde { dt: 1e-3 })?;
    println!("continuum part at t = 0.5: sup {:.6}", pde.sup_norm());

    let zs: Vec<f64> = (0..201).map(|i| -10.0 + 0.1 * i as f64).collect();
    let ia = lemma1_bound_check(params.a, &zs, &[1.0, 10.0, 100.0])?;
    println!(
        "max |I_a| sqrt(t) = {:.4} at z = {}, t = {}; quoted bound {:.4} {}",
        ia.max_scaled,
        ia.z_at_max,
        ia.t_at_max,
        ia.bound,
        if ia.holds { "holds" } else { "is exceeded" }
    );
    Ok(())
}
