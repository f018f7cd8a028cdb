//! Bound state, resolvent and evolution kernel of the linear delta-shell Hamiltonian.
use num_complex::Complex64;
use winter_nls::linear::{
    bound_state, calg, eigenfunction_bounds_check, evolution_kernel, lemma2_bounds_check, q_factor, resolvent_kernel,
    ModelParams,
};

fn main() -> winter_nls::Result<()> {
    let params = ModelParams::new(1.0, -4.0)?;
    let spec = bound_state(&params);
    match spec.bound {
        Some(b) => println!("bound state: h = {:.15}, E = {:.15}, B = {:.6}", b.h, b.energy, b.b),
        None => println!("no bound state"),
    }
    let bounds = eigenfunction_bounds_check(&params)?;
    println!("eigenfunction: norm^2 {:.12}, sup {:.6} (scaled bound {:.6})", bounds.norm_sq, bounds.sup_norm, bounds.sup_bound_scaled);

    if let Some(b) = spec.bound {
        let k = Complex64::new(0.0, b.h);
        println!("G(i h) = {:.2e}", calg(k, &params).norm());
    }
    let k = Complex64::new(1.0, 0.5);
    println!("resolvent (0.5, 2.0; k = 1 + 0.5i) = {}", resolvent_kernel(0.5, 2.0, k, &params)?);
    println!("q(k = 2, x = 0.5, y = 3) = {}", q_factor(2.0, 0.5, 3.0, &params));
    for t in [0.1, 1.0, 10.0] {
        println!("U(0.5, 2.0, t = {t}) = {}", evolution_kernel(0.5, 2.0, t, &params)?);
    }

    let repulsive = ModelParams::new(1.0, 2.0)?;
    let grid: Vec<f64> = (1..=2000).map(|i| i as f64 * 0.01).collect();
    let report = lemma2_bounds_check(&repulsive, &grid);
    println!("Q(k) bounds on alpha = 2: {} violations, max |Q'| = {:.4}", report.violations, report.max_q_prime);
    Ok(())
}
