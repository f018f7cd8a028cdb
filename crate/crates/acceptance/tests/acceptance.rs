use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;
use std::time::Instant;
use winter_nls::cli::main_with_args;
use winter_nls::dynamics::{
    classify_blowup, evolve, virial_real_identity_check, Classification, EvolveOptions, Nonlinearity, Rule, WaveField,
};
use winter_nls::linear::{
    bound_state, dispersive_check, eigenstate_field, gaussian_field, lemma1_bound_check, DispersiveOptions, ModelParams,
};
use winter_nls::quad::integrate;
use winter_nls::specfun::{elliptic_k, jacobi, lambert_w0, lambert_wm1, EllipticModulus};
use winter_nls::stationary::{
    default_p_grid, figure1_dataset, solve_branch, stability_slope, BranchOptions, Figure1Options, Regime,
    StationaryState,
};

type Check = Result<(bool, String), String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn cli_json(args: &[&str]) -> Result<(Value, f64), String> {
    let dir = tempfile::tempdir().map_err(err)?;
    let out = dir.path().join("out.json");
    let mut full = vec!["winter-nls".to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    full.extend(["--format".into(), "json".into(), "--output".into(), out.to_string_lossy().into_owned()]);
    let start = Instant::now();
    let code = main_with_args(full);
    let secs = start.elapsed().as_secs_f64();
    if code != 0 {
        return Err(format!("exit code {code}"));
    }
    let text = std::fs::read_to_string(&out).map_err(err)?;
    Ok((serde_json::from_str(&text).map_err(err)?, secs))
}

fn params() -> ModelParams {
    ModelParams::new(1.0, -4.0).unwrap()
}

fn criterion_1() -> Check {
    let (v, secs) = cli_json(&["spectrum", "--a", "1", "--alpha", "-4"])?;
    let e = v["result"]["E"].as_f64().ok_or("missing E")?;
    Ok(((e + 3.843).abs() <= 5e-3 && secs < 1.0, format!("E = {e:.12}, runtime {secs:.3} s")))
}

fn criterion_2() -> Check {
    let (v, secs) = cli_json(&["bifurcation", "--a", "1", "--alpha", "-4"])?;
    let pts = v["result"]["bifurcations"].as_array().ok_or("missing bifurcations")?;
    let refs = [(-19.354, -6.825), (-81.740, -54.417)];
    let mut ok = pts.len() >= 2 && secs < 60.0;
    let mut detail = Vec::new();
    for (p, (eta, om)) in pts.iter().zip(refs) {
        let e = p["eta_n"].as_f64().ok_or("missing eta_n")?;
        let o = p["Omega_n"].as_f64().ok_or("missing Omega_n")?;
        ok &= (e - eta).abs() <= 0.02 && (o - om).abs() <= 0.02;
        detail.push(format!("({e:.5}, {o:.5})"));
    }
    Ok((ok, format!("points {}, runtime {secs:.2} s", detail.join(" "))))
}

fn criterion_3() -> Check {
    let e = bound_state(&params()).bound.ok_or("no bound state")?.energy;
    let d = figure1_dataset(&Figure1Options::default()).map_err(err)?;
    let ground = &d.branch("Omega_0").ok_or("no Omega_0 branch")?.states;
    let first = ground.first().ok_or("empty Omega_0 branch")?;
    let last = ground.last().unwrap();
    let gap = (first.omega - e).abs();
    let ok = (first.eta + 1e-3).abs() < 1e-9 && gap <= 1e-2 && last.eta <= -110.0 + 1e-9;
    Ok((ok, format!("{} states over eta in [{}, {:.3e}], |Omega_0(-1e-3) - E| = {gap:.3e}", ground.len(), last.eta, first.eta)))
}

fn criterion_4() -> Check {
    let mut rng = StdRng::seed_from_u64(20_240_601);
    let mut jac: f64 = 0.0;
    for _ in 0..10_000 {
        let u: f64 = rng.gen_range(-100.0..100.0);
        let p: f64 = rng.gen_range(0.0..1.0);
        let m = EllipticModulus::new(p).map_err(err)?;
        let s = jacobi(u, m);
        jac = jac.max((s.sn * s.sn + s.cn * s.cn - 1.0).abs());
        jac = jac.max((s.dn * s.dn + p * p * s.sn * s.sn - 1.0).abs());
    }
    let mut lw: f64 = 0.0;
    for _ in 0..10_000 {
        let x: f64 = if rng.gen_bool(0.5) {
            -rng.gen_range(0.0..(-1.0f64).exp())
        } else {
            10f64.powf(rng.gen_range(-8.0..8.0))
        };
        let w = lambert_w0(x).map_err(err)?;
        lw = lw.max((w * w.exp() - x).abs() / x.abs().max(1.0));
        if x < 0.0 {
            let w = lambert_wm1(x).map_err(err)?;
            lw = lw.max((w * w.exp() - x).abs() / x.abs().max(1.0));
        }
    }
    let mut kq: f64 = 0.0;
    for _ in 0..200 {
        let p: f64 = rng.gen_range(0.0..0.999);
        let q = integrate(|th: f64| 1.0 / (1.0 - (p * th.sin()).powi(2)).sqrt(), 0.0, std::f64::consts::FRAC_PI_2, &[], 0.0, 1e-14)
            .map_err(err)?
            .value;
        kq = kq.max((elliptic_k(EllipticModulus::new(p).map_err(err)?).map_err(err)? - q).abs());
    }
    let ok = jac <= 1e-12 && lw <= 1e-12 && kq <= 1e-10;
    Ok((ok, format!("Jacobi identities {jac:.2e}, Lambert W residual {lw:.2e}, K vs quadrature {kq:.2e}")))
}

fn criterion_5() -> Check {
    let p = params();
    let mut states: Vec<StationaryState> = Vec::new();
    let d = figure1_dataset(&Figure1Options::default()).map_err(err)?;
    states.extend(d.branches.iter().flat_map(|b| b.states.iter().cloned()));
    states.extend(d.bifurcations.iter().map(|b| b.state.clone()));
    for (regime, ells) in [(Regime::Focusing, &[1u8, 2][..]), (Regime::Defocusing, &[2u8][..])] {
        let grid = default_p_grid(regime, 80, 60, 1e-14);
        for &ell in ells {
            states.extend(solve_branch(regime, ell, &p, &grid, &BranchOptions::default()).map_err(err)?);
        }
    }
    let ode = states.iter().map(|s| s.invariants().ode_residual).fold(0.0, f64::max);
    let jump = states.iter().map(|s| s.invariants().jump_error).fold(0.0, f64::max);
    Ok((ode <= 1e-6 && jump <= 1e-8, format!("{} states, worst ODE residual {ode:.2e}, worst jump error {jump:.2e}", states.len())))
}

fn criterion_6() -> Check {
    let p = ModelParams::new(1.0, 2.0).map_err(err)?;
    let opts = DispersiveOptions::default();
    let psi0 = gaussian_field(&p, opts.l, opts.dx, 1.0, 0.5).map_err(err)?;
    let report = dispersive_check(&psi0, &p, &opts).map_err(err)?;
    let flat = report.loglog_slope.abs() <= 0.05;
    let zs: Vec<f64> = (0..401).map(|i| -10.0 + 20.0 * i as f64 / 400.0).collect();
    let ia = lemma1_bound_check(p.a, &zs, &opts.times).map_err(err)?;
    Ok((
        flat && ia.holds,
        format!(
            "log-log slope {:.4} ({}), empirical constant {:.4}; max |I_a| sqrt(t) = {:.4} at (z, t) = ({}, {}) vs bound {:.4} ({})",
            report.loglog_slope,
            if flat { "flat" } else { "not flat" },
            report.empirical_constant,
            ia.max_scaled,
            ia.z_at_max,
            ia.t_at_max,
            ia.bound,
            if ia.holds { "holds" } else { "violated" }
        ),
    ))
}

fn drifts(tr: &winter_nls::dynamics::Trajectory, t_final: f64) -> (f64, f64, f64) {
    let r0 = &tr.records[0];
    let norm = tr.records.iter().map(|r| (r.norm_sq - r0.norm_sq).abs()).fold(0.0, f64::max);
    let energy = tr.records.iter().map(|r| (r.energy - r0.energy).abs()).fold(0.0, f64::max) / t_final;
    (norm, energy, 1e-6 * r0.energy.abs().max(1.0))
}

fn criterion_7() -> Check {
    let p = params();
    let like = WaveField::zeros(&p, 40.0, 0.01).map_err(err)?;
    let psi = eigenstate_field(&p, &like).map_err(err)?.ok_or("no eigenstate")?;
    let opts = EvolveOptions { t_final: 10.0, dt: 1e-3, observer_stride: 100, adaptive: false, ..Default::default() };
    let tr = evolve(&psi, &p, &Nonlinearity::linear(), &opts).map_err(err)?;
    let (norm, _, _) = drifts(&tr, opts.t_final);
    let overlap = tr.field.inner(&psi).norm();
    let g = gaussian_field(&p, 20.0, 0.01, 2.0, 0.5).map_err(err)?;
    let nl = Nonlinearity { eta: -1.0, sigma: 1.0 };
    let nopts = EvolveOptions { t_final: 1.0, dt: 2.5e-4, observer_stride: 40, adaptive: false, ..Default::default() };
    let ntr = evolve(&g, &p, &nl, &nopts).map_err(err)?;
    let (_, energy, allowed) = drifts(&ntr, nopts.t_final);
    let ok = norm <= 1e-8 && overlap >= 1.0 - 1e-6 && energy <= allowed;
    Ok((
        ok,
        format!("eigenstate norm drift {norm:.2e}, overlap {overlap:.10}; nonlinear energy drift {energy:.2e} per unit time (allowed {allowed:.2e})"),
    ))
}

fn criterion_8() -> Check {
    let p = params();
    let psi = gaussian_field(&p, 20.0, 0.01, 5.0, 1.0).map_err(err)?;
    let residual = virial_real_identity_check(&psi, p.a);
    let nl = Nonlinearity { eta: -1.0, sigma: 1.0 };
    let opts = EvolveOptions { t_final: 1.0, dt: 1e-4, observer_stride: 1, adaptive: false, q: p.a, ..Default::default() };
    let tr = evolve(&psi, &p, &nl, &opts).map_err(err)?;
    let r = &tr.records;
    let s1 = r.iter().map(|x| x.i_q_dot.abs()).fold(0.0, f64::max);
    let s2 = r.iter().map(|x| x.i_q_ddot.abs()).fold(0.0, f64::max);
    let (mut e1, mut e2): (f64, f64) = (0.0, 0.0);
    for k in 1..r.len() - 1 {
        let h = r[k + 1].t - r[k - 1].t;
        e1 = e1.max(((r[k + 1].i_q - r[k - 1].i_q) / h - r[k].i_q_dot).abs() / s1);
        e2 = e2.max(((r[k + 1].i_q_dot - r[k - 1].i_q_dot) / h - r[k].i_q_ddot).abs() / s2);
    }
    Ok((
        e1 <= 1e-4 && e2 <= 1e-3 && residual <= 1e-4,
        format!("first-derivative identity {e1:.2e}, second-derivative identity {e2:.2e} (relative), real-data identity residual {residual:.2e}"),
    ))
}

fn criterion_9() -> Check {
    let p = params();
    let psi = gaussian_field(&p, 40.0, 0.01, 2.0, 0.5).map_err(err)?;
    let focus = Nonlinearity { eta: -50.0, sigma: 3.0 };
    let probe = EvolveOptions { t_final: 0.5, dt: 1e-4, ..Default::default() };
    let v = classify_blowup(&p, &focus, &psi, Some(&probe)).map_err(err)?;
    let detected = v.probe.as_ref().map(|x| x.blowup_detected).unwrap_or(false);
    let t_max = v.t_max_estimate.unwrap_or(f64::NAN);
    let blow_ok = v.initial_energy < 0.0
        && v.rule == Rule::Thm3Conditional
        && v.classification == Classification::BlowupPredicted
        && detected
        && t_max.is_finite();
    let defocus = Nonlinearity { eta: 50.0, sigma: 3.0 };
    let opts = EvolveOptions { t_final: 1.0, dt: 5e-5, observer_stride: 200, ..Default::default() };
    let tr = evolve(&psi, &p, &defocus, &opts).map_err(err)?;
    let (norm, energy, allowed) = drifts(&tr, opts.t_final);
    let global = tr.blowup.is_none() && (tr.t_end - opts.t_final).abs() < 1e-9;
    let def_ok = global && norm <= 1e-8 && energy <= allowed;
    Ok((
        blow_ok && def_ok,
        format!(
            "eta=-50: E0 = {:.4}, rule {:?}, blow-up detected {detected}, T_max ~ {t_max:.5}; eta=+50: reached t = {}, norm drift {norm:.2e}, energy drift {energy:.2e} per unit time (allowed {allowed:.2e})",
            v.initial_energy, v.rule, tr.t_end
        ),
    ))
}

fn criterion_10() -> Check {
    let d = figure1_dataset(&Figure1Options::default()).map_err(err)?;
    let ground = &d.branch("Omega_0").ok_or("no Omega_0 branch")?.states;
    let slopes = stability_slope(ground, 0.0).map_err(err)?;
    let min = slopes.iter().map(|s| s.slope).fold(f64::INFINITY, f64::min);
    Ok((!slopes.is_empty() && min > 0.0, format!("{} interior points, smallest d(mu^2)/d(omega) = {min:.4}", slopes.len())))
}

fn main() {
    let criteria: [(u32, fn() -> Check); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, f) in criteria {
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!("criterion {n}: {}: {detail} [{:.1} s]", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
