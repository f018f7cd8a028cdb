//! Elliptic stationary states, saddle-node points and the slope test of the focusing cubic problem.
use num_complex::Complex64;
use winter_nls::linear::ModelParams;
use winter_nls::stationary::{
    check_real_reduction, default_p_grid, find_all_bifurcations, solve_branch, stability_slope, BranchOptions, Regime,
    SearchBox,
};

fn main() -> winter_nls::Result<()> {
    let params = ModelParams::new(1.0, -4.0)?;
    let grid = default_p_grid(Regime::Focusing, 40, 20, 1e-10);
    let branch = solve_branch(Regime::Focusing, 2, &params, &grid, &BranchOptions::default())?;
    println!("{} focusing states with ell = 2", branch.len());
    for s in branch.iter().step_by((branch.len() / 8).max(1)) {
        let inv = s.invariants();
        println!(
            "p {:.6} lambda' {:.6} Omega {:>12.6} eta {:>12.6}  ODE residual {:.1e} jump {:.1e}",
            s.p.p(),
            s.lambda_prime,
            s.omega,
            s.eta,
            inv.ode_residual,
            inv.jump_error
        );
    }

    for b in find_all_bifurcations(Regime::Focusing, &params, &SearchBox::default_for(&params))? {
        println!("saddle-node {}: eta = {:.6}, Omega = {:.6} (ell = {})", b.n, b.eta_n, b.omega_n, b.ell);
    }

    if let Ok(slopes) = stability_slope(&branch, 1e-8) {
        let stable = slopes.iter().filter(|e| e.slope > 0.0).count();
        println!("slope test: {stable} of {} interior states have d(mu^2)/d(omega) > 0", slopes.len());
    }

    let s = &branch[branch.len() / 2];
    let dx = 0.01;
    let psi: Vec<Complex64> = (0..1000).map(|j| Complex64::from_polar(s.profile(j as f64 * dx), 0.4)).collect();
    let r = check_real_reduction(&psi, dx);
    println!("rotated profile: phase {:.6}, Wronskian {:.1e}", r.phase, r.max_wronskian);
    Ok(())
}
