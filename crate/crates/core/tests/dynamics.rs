use num_complex::Complex64;
use winter_nls::dynamics::*;
use winter_nls::linear::{bound_state, eigenstate_field, gaussian_field, ModelParams};
use winter_nls::stationary::{figure1_dataset, Figure1Options};
use winter_nls::Error;

fn params() -> ModelParams {
    ModelParams::new(1.0, -4.0).unwrap()
}

#[test]
fn wave_field_requires_grid_aligned_shell() {
    let p = ModelParams::new(1.05, -4.0).unwrap();
    assert!(matches!(WaveField::zeros(&p, 10.0, 0.1), Err(Error::InvalidParameter(_))));
    let f = WaveField::zeros(&params(), 10.0, 0.01).unwrap();
    assert_eq!(f.j_a, 100);
    assert!((f.a() - 1.0).abs() < 1e-15);
    f.validate().unwrap();
}

#[test]
fn eigenstate_evolves_by_a_phase() {
    let p = params();
    let like = WaveField::zeros(&p, 30.0, 0.01).unwrap();
    let psi = eigenstate_field(&p, &like).unwrap().unwrap();
    let opts = EvolveOptions { t_final: 2.0, dt: 1e-3, observer_stride: 100, adaptive: false, ..Default::default() };
    let tr = evolve(&psi, &p, &Nonlinearity::linear(), &opts).unwrap();
    assert!(tr.blowup.is_none());
    let overlap = tr.field.inner(&psi).norm();
    assert!(overlap >= 1.0 - 1e-6, "overlap {overlap}");
    let e = bound_state(&p).bound.unwrap().energy;
    let rel = (tr.records.last().unwrap().energy - e).abs() / e.abs();
    assert!(rel < 1e-3, "discrete energy {} vs {e}", tr.records[0].energy);
}

#[test]
fn linear_norm_drift_per_step_is_tiny() {
    let p = params();
    let psi = gaussian_field(&p, 20.0, 0.01, 2.0, 0.4).unwrap();
    let opts = EvolveOptions { t_final: 0.5, dt: 1e-3, observer_stride: 1, adaptive: false, ..Default::default() };
    let tr = evolve(&psi, &p, &Nonlinearity::linear(), &opts).unwrap();
    for w in tr.records.windows(2) {
        assert!((w[1].norm_sq - w[0].norm_sq).abs() <= 1e-10);
    }
}

#[test]
fn nonlinear_energy_is_conserved() {
    let p = params();
    let psi = gaussian_field(&p, 20.0, 0.01, 2.0, 0.5).unwrap();
    let nl = Nonlinearity { eta: -1.0, sigma: 1.0 };
    let opts = EvolveOptions { t_final: 1.0, dt: 2.5e-4, observer_stride: 400, adaptive: false, ..Default::default() };
    let tr = evolve(&psi, &p, &nl, &opts).unwrap();
    let e0 = tr.records[0].energy;
    let drift = tr.records.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max) / opts.t_final;
    assert!(drift <= 1e-6 * e0.abs().max(1.0), "drift {drift}");
    let n0 = tr.records[0].norm_sq;
    assert!(tr.records.iter().all(|r| (r.norm_sq - n0).abs() < 1e-9));
}

#[test]
fn energy_matches_its_definition() {
    let p = params();
    let psi = gaussian_field(&p, 20.0, 0.01, 2.0, 0.5).unwrap();
    let nl = Nonlinearity { eta: 3.0, sigma: 1.5 };
    let grad: f64 = psi.values.windows(2).map(|w| ((w[1] - w[0]) / psi.dx).norm_sqr()).sum::<f64>() * psi.dx;
    let lp: f64 = psi.values.iter().map(|v| v.norm().powf(5.0)).sum::<f64>() * psi.dx;
    let expected = grad + p.alpha * psi.values[psi.j_a].norm_sqr() + 3.0 / 2.5 * lp;
    assert!((energy(&psi, &p, &nl) - expected).abs() < 1e-10 * expected.abs());
}

#[test]
fn virial_identities_for_real_data() {
    let p = params();
    let psi = gaussian_field(&p, 20.0, 0.01, 3.0, 0.5).unwrap();
    assert!(virial_first(&psi, 1.0).abs() < 1e-14);
    let residual = virial_real_identity_check(&psi, 1.0);
    let expected = psi.dx * psi.dx * psi.gradient_norm_sq();
    assert!((residual - expected).abs() < 1e-12, "{residual} vs {expected}");
    let wide = gaussian_field(&p, 20.0, 0.01, 5.0, 1.0).unwrap();
    assert!(virial_real_identity_check(&wide, 1.0) < 1e-4);
    let i = moment_of_inertia(&psi, 3.0);
    assert!((i - 0.125).abs() < 1e-3, "I = {i}");
}

#[test]
fn virial_first_tracks_the_moment_of_inertia() {
    let p = params();
    let psi = gaussian_field(&p, 20.0, 0.01, 2.5, 0.5).unwrap();
    let boosted = {
        let mut f = psi.clone();
        for j in 0..f.len() {
            let x = f.x(j);
            f.values[j] *= Complex64::new(0.0, 1.5 * x).exp();
        }
        f
    };
    let nl = Nonlinearity { eta: -1.0, sigma: 1.0 };
    let dt = 1e-4;
    let opts = EvolveOptions { t_final: 0.05, dt, observer_stride: 1, adaptive: false, q: 1.0, ..Default::default() };
    let tr = evolve(&boosted, &p, &nl, &opts).unwrap();
    let r = &tr.records;
    let scale = r.iter().map(|x| x.i_q_dot.abs()).fold(0.0, f64::max);
    for k in 1..r.len() - 1 {
        let fd = (r[k + 1].i_q - r[k - 1].i_q) / (r[k + 1].t - r[k - 1].t);
        assert!((fd - r[k].i_q_dot).abs() <= 1e-4 * scale, "t = {}: {fd} vs {}", r[k].t, r[k].i_q_dot);
    }
}

#[test]
fn blowup_rules() {
    let p = params();
    let psi = gaussian_field(&p, 20.0, 0.01, 2.0, 0.5).unwrap();
    let rule = |eta: f64, sigma: f64| classify_blowup(&p, &Nonlinearity { eta, sigma }, &psi, None).unwrap();
    assert_eq!(rule(1.0, 3.0).rule, Rule::Thm2I);
    assert_eq!(rule(0.0, 1.0).classification, Classification::GlobalExistence);
    assert_eq!(rule(-1.0, 1.5).rule, Rule::Thm2Ii);
    assert_eq!(rule(-1.0, 2.0).rule, Rule::Thm2IiiIndeterminate);
    let v = rule(-50.0, 3.0);
    assert!(v.initial_energy < 0.0);
    assert_eq!(v.rule, Rule::Thm3Conditional);
    assert_eq!(v.classification, Classification::BlowupPredicted);
    assert!(v.eta_c.is_none() && v.c1.is_none() && v.c2.is_none());
    let v = rule(-0.1, 3.0);
    assert!(v.initial_energy >= 0.0);
    assert_eq!(v.rule, Rule::Thm2IvIndeterminate);
}

#[test]
fn supercritical_collapse_is_detected() {
    let p = params();
    let psi = gaussian_field(&p, 20.0, 0.01, 2.0, 0.5).unwrap();
    let nl = Nonlinearity { eta: -50.0, sigma: 3.0 };
    let opts = EvolveOptions { t_final: 1.0, dt: 1e-3, ..Default::default() };
    let v = classify_blowup(&p, &nl, &psi, Some(&opts)).unwrap();
    let probe = v.probe.unwrap();
    assert!(probe.blowup_detected);
    assert_eq!(probe.rule, Some(Rule::NumericalBlowupDetected));
    let t = probe.t_max_estimate.unwrap();
    assert!(t.is_finite() && t > 0.0 && t < 1.0);
}

#[test]
fn nan_input_is_a_numerical_failure() {
    let p = params();
    let mut psi = gaussian_field(&p, 20.0, 0.01, 2.0, 0.5).unwrap();
    psi.values[50] = Complex64::new(f64::NAN, 0.0);
    let opts = EvolveOptions { t_final: 0.01, dt: 1e-3, adaptive: false, ..Default::default() };
    assert!(evolve(&psi, &p, &Nonlinearity { eta: -1.0, sigma: 1.0 }, &opts).is_err());
}

#[test]
fn stationary_ground_state_keeps_its_shape() {
    let p = params();
    let d = figure1_dataset(&Figure1Options { eta_min: -3.0, ..Default::default() }).unwrap();
    let s = d.branch("Omega_0").unwrap().states.iter().find(|s| (s.eta + 2.0).abs() < 1e-6).unwrap().clone();
    let mu = s.mu_sq.sqrt();
    let psi0 = WaveField::from_real_fn(&p, 30.0, 0.01, |x| s.profile(x) / mu).unwrap();
    let nl = Nonlinearity { eta: s.eta, sigma: 1.0 };
    let opts = EvolveOptions {
        t_final: 5.0,
        dt: 1e-3,
        observer_stride: 500,
        snapshot_stride: Some(500),
        adaptive: false,
        ..Default::default()
    };
    let tr = evolve(&psi0, &p, &nl, &opts).unwrap();
    let worst = tr
        .snapshots
        .iter()
        .flat_map(|(_, f)| f.values.iter().zip(&psi0.values).map(|(a, b)| (a.norm() - b.norm()).abs()))
        .fold(0.0, f64::max);
    assert!(worst <= 1e-4, "shape deviation {worst}");
}
