//! Split-step evolution, virial diagnostics and the blow-up classification.
use winter_nls::dynamics::{
    classify_blowup, energy, evolve, moment_of_inertia, virial_first, virial_second, EvolveOptions, Nonlinearity,
};
use winter_nls::linear::{gaussian_field, ModelParams};

fn main() -> winter_nls::Result<()> {
    let params = ModelParams::new(1.0, -4.0)?;
    let psi0 = gaussian_field(&params, 40.0, 0.01, 2.0, 0.5)?;

    let cubic = Nonlinearity { eta: -1.0, sigma: 1.0 };
    println!(
        "initial data: E = {:.6}, I_a = {:.6}, dI/dt = {:.6}, d2I/dt2 = {:.6}",
        energy(&psi0, &params, &cubic),
        moment_of_inertia(&psi0, params.a),
        virial_first(&psi0, params.a),
        virial_second(&psi0, params.a, &params, &cubic)
    );
    let opts = EvolveOptions { t_final: 1.0, dt: 2.5e-4, observer_stride: 800, q: params.a, adaptive: false, ..Default::default() };
    let run = evolve(&psi0, &params, &cubic, &opts)?;
    for r in &run.records {
        println!("t {:.3}  norm^2 {:.12}  E {:.10}  I {:.6}", r.t, r.norm_sq, r.energy, r.i_q);
    }

    let septic = Nonlinearity { eta: -50.0, sigma: 3.0 };
    let probe = EvolveOptions { t_final: 0.5, dt: 1e-4, ..Default::default() };
    let verdict = classify_blowup(&params, &septic, &psi0, Some(&probe))?;
    println!(
        "eta = -50, sigma = 3: {:?} by {:?}, E0 = {:.4}, T_max ~ {:?}",
        verdict.classification, verdict.rule, verdict.initial_energy, verdict.t_max_estimate
    );
    Ok(())
}
