use num_complex::Complex64;
use std::collections::HashSet;
use winter_nls::linear::{bound_state, ModelParams};
use winter_nls::specfun::EllipticModulus;
use winter_nls::stationary::*;
use winter_nls::Error;

fn params() -> ModelParams {
    ModelParams::new(1.0, -4.0).unwrap()
}

#[test]
fn regime_parsing_and_signs() {
    assert_eq!("focusing".parse::<Regime>().unwrap(), Regime::Focusing);
    assert_eq!("defocusing".parse::<Regime>().unwrap(), Regime::Defocusing);
    assert!("sideways".parse::<Regime>().is_err());
    assert_eq!(Regime::Focusing.g(), -1.0);
    assert_eq!(Regime::Defocusing.g(), 1.0);
    assert_eq!(ell_sign(1).unwrap(), -1.0);
    assert_eq!(ell_sign(2).unwrap(), 1.0);
    assert!(ell_sign(3).is_err());
}

#[test]
fn literal_and_reduced_forms_agree() {
    let p = params();
    for (pp, lp, ell) in [(0.8, 2.3, 1u8), (0.9, 1.5, 2), (0.95, 4.0, 1)] {
        let m = EllipticModulus::new(pp).unwrap();
        let lit = h_focusing(m, lp, ell, &p).unwrap();
        let red = h_focusing_reduced(m, lp, ell, &p).unwrap();
        match (lit, red) {
            (Some(l), Some(r)) => assert!((l - m.pc() * r).abs() < 1e-10 * (1.0 + l.abs()), "{pp} {lp} {ell}: {l} vs {r}"),
            (None, None) => {}
            other => panic!("admissibility differs: {other:?}"),
        }
    }
    let m = EllipticModulus::new(0.5).unwrap();
    let lit = h_defocusing(m, 1.2, 2, &p).unwrap();
    let red = h_defocusing_reduced(m, 1.2, 2, &p).unwrap();
    assert!((lit - m.pc() * red).abs() < 1e-10 * (1.0 + lit.abs()));
}

#[test]
fn focusing_equation_needs_supercritical_modulus() {
    let p = params();
    let m = EllipticModulus::new(0.6).unwrap();
    assert!(matches!(EffectiveEquation::new(Regime::Focusing, m, &p), Err(Error::Domain(_))));
    assert!(!in_domain(Regime::Focusing, m));
    assert!(in_domain(Regime::Defocusing, m));
}

#[test]
fn unit_modulus_limit_reproduces_the_linear_eigenvalue() {
    let p = params();
    let h = bound_state(&p).bound.unwrap().h;
    for regime in [Regime::Focusing, Regime::Defocusing] {
        let m = EllipticModulus::from_complement(1e-12).unwrap();
        let value = match regime {
            Regime::Focusing => h_focusing_reduced(m, h, 2, &p).unwrap().unwrap(),
            Regime::Defocusing => h_defocusing_reduced(m, h, 2, &p).unwrap(),
        };
        assert!(value.abs() < 1e-9, "{regime:?}: {value}");
        let roots = effective_roots(regime, 2, m, &p, &BranchOptions::default()).unwrap();
        assert!(roots.iter().any(|r| (r - h).abs() < 1e-9), "{regime:?}: {roots:?}");
    }
}

#[test]
fn reconstructed_states_satisfy_the_equation() {
    let p = params();
    let grid = default_p_grid(Regime::Focusing, 30, 20, 1e-10);
    for ell in [1u8, 2] {
        let states = solve_branch(Regime::Focusing, ell, &p, &grid, &BranchOptions::default()).unwrap();
        assert!(!states.is_empty());
        for s in &states {
            let inv = s.invariants();
            assert!(inv.passes(), "{inv:?}");
            assert!(inv.ode_residual <= 1e-6 && inv.jump_error <= 1e-8);
            assert!(s.eta < 0.0 && (s.eta + s.mu_sq).abs() < 1e-12 * s.mu_sq);
            let q = norm_mu_sq_quadrature(s).unwrap();
            assert!((q - s.mu_sq).abs() <= 1e-10 * s.mu_sq.max(1.0));
        }
    }
}

#[test]
fn defocusing_branch_has_positive_eta_and_ends_in_the_linear_limit() {
    let p = params();
    let grid = default_p_grid(Regime::Defocusing, 40, 30, 1e-12);
    let states = solve_branch(Regime::Defocusing, 2, &p, &grid, &BranchOptions::default()).unwrap();
    assert!(states.len() > 20);
    let e = bound_state(&p).bound.unwrap().energy;
    for s in &states {
        assert!(s.eta >= 0.0);
        assert!(s.omega >= e - 1e-9);
        assert!(s.invariants().passes());
    }
    let lowest = states.iter().map(|s| s.eta).fold(f64::INFINITY, f64::min);
    assert!(lowest < 1e-6);
    let m = EllipticModulus::new(0.5).unwrap();
    assert!(matches!(reconstruct(Regime::Defocusing, 1, m, 1.0, &p), Err(Error::Pole(_))));
}

#[test]
fn bifurcation_points_match_reference_values() {
    let p = params();
    let pts = find_all_bifurcations(Regime::Focusing, &p, &SearchBox::default_for(&p)).unwrap();
    assert!(pts.len() >= 2);
    let refs = [(-19.354, -6.825), (-81.740, -54.417)];
    for (b, (eta, omega)) in pts.iter().zip(refs) {
        assert!((b.eta_n - eta).abs() <= 1e-3 && (b.omega_n - omega).abs() <= 1e-3, "{b:?}");
        assert!(b.residual_h <= 1e-10 && b.residual_hp <= 1e-10);
        assert!(b.state.invariants().passes());
        let d = h_p_derivative(Regime::Focusing, b.ell, b.state.p, b.lambda_prime, &p).unwrap();
        assert!(d.abs() <= 1e-10);
        assert_eq!(fold_root_counts(b, &p, 1e-3, 0.05).unwrap(), (0, 2));
    }
    assert_eq!(pts[0].n, 1);
    assert!(pts.windows(2).all(|w| w[0].eta_n > w[1].eta_n));
}

#[test]
fn figure1_dataset_contract() {
    let d = figure1_dataset(&Figure1Options::default()).unwrap();
    let labels: Vec<&str> = d.branches.iter().map(|b| b.label.as_str()).collect();
    assert_eq!(labels, ["Omega_0", "Omega_1+", "Omega_1-", "Omega_2+", "Omega_2-"]);
    let e = bound_state(&params()).bound.unwrap().energy;
    let ground = d.branch("Omega_0").unwrap();
    let first = &ground.states[0];
    assert!((first.eta + 1e-3).abs() < 1e-9);
    assert!((first.omega - e).abs() <= 1e-2);
    assert!(ground.states.last().unwrap().eta <= -110.0 + 1e-9);
    let eta1 = d.bifurcations[0].eta_n;
    let rows = d.rows();
    let mut seen = HashSet::new();
    for b in &d.branches {
        assert!(b.states.windows(2).all(|w| w[1].eta < w[0].eta), "{} not monotone", b.label);
        for s in &b.states {
            assert!(seen.insert((b.label.clone(), s.eta.to_bits())));
            assert!(s.invariants().passes());
        }
    }
    for n in [1, 2] {
        let plus = &d.branch(&format!("Omega_{n}+")).unwrap().states;
        let minus = &d.branch(&format!("Omega_{n}-")).unwrap().states;
        assert_eq!(plus.len(), minus.len());
        for (u, v) in plus.iter().zip(minus) {
            assert!((u.eta - v.eta).abs() < 1e-9);
            assert!(u.omega > v.omega);
        }
        assert!((plus[0].eta - d.bifurcations[n - 1].eta_n).abs() < 0.5);
    }
    assert!(d.branch("Omega_1+").unwrap().states.iter().all(|s| s.eta < eta1 + 0.5));
    assert!(rows.iter().any(|r| r.branch_label == "bifurcation-1"));
    assert!(rows.iter().any(|r| r.branch_label == "bifurcation-2"));
}

#[test]
fn slope_of_a_synthetic_linear_branch_is_one() {
    let branch: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.3, i as f64 * 0.3)).collect();
    let s = stability_slope(&branch, 1e-9).unwrap();
    assert_eq!(s.len(), 8);
    for e in &s {
        assert!((e.slope - 1.0).abs() < 1e-12);
        assert_eq!(e.classification, SlopeClass::Stable);
        assert!(e.caveat.starts_with("conjectural"));
    }
    let mut reversed = branch.clone();
    reversed.reverse();
    let r = stability_slope(&reversed, 1e-9).unwrap();
    for (a, b) in s.iter().zip(&r) {
        assert_eq!(a.slope, b.slope);
        assert_eq!(a.omega, b.omega);
    }
    let down: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, -(i as f64))).collect();
    assert!(stability_slope(&down, 1e-9).unwrap().iter().all(|e| e.classification == SlopeClass::Unstable));
    let flat: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0)).collect();
    assert!(stability_slope(&flat, 1e-9).unwrap().iter().all(|e| e.classification == SlopeClass::Marginal));
}

#[test]
fn slope_needs_three_states() {
    let branch = [(0.0, 1.0), (1.0, 2.0)];
    assert!(matches!(stability_slope(&branch, 1e-9), Err(Error::InvalidParameter(_))));
}

#[test]
fn slope_is_second_order_on_nonuniform_grids() {
    let ws = [0.0, 0.1, 0.35, 0.4, 0.9, 1.0];
    let branch: Vec<(f64, f64)> = ws.iter().map(|&w| (w, w * w)).collect();
    for e in stability_slope(&branch, 1e-9).unwrap() {
        assert!((e.slope - 2.0 * e.omega).abs() < 1e-12);
    }
}

#[test]
fn fold_arms_join_continuously_on_a_fine_grid() {
    let d = figure1_dataset(&Figure1Options { eta_step: 0.05, ..Default::default() }).unwrap();
    for n in [1, 2] {
        let plus = &d.branch(&format!("Omega_{n}+")).unwrap().states;
        let minus = &d.branch(&format!("Omega_{n}-")).unwrap().states;
        let gap0 = plus[0].omega - minus[0].omega;
        assert!(gap0 > 0.0 && gap0 < 0.5, "branch {n}: {gap0}");
        assert!(plus[10].omega - minus[10].omega > gap0);
    }
}

#[test]
fn ground_branch_slope_is_positive() {
    let d = figure1_dataset(&Figure1Options::default()).unwrap();
    let s = stability_slope(&d.branch("Omega_0").unwrap().states, 0.0).unwrap();
    assert!(s.iter().all(|e| e.slope > 0.0));
}

#[test]
fn real_reduction_of_real_and_rotated_profiles() {
    let xs: Vec<f64> = (0..400).map(|j| j as f64 * 0.01).collect();
    let real: Vec<Complex64> = xs.iter().map(|x| Complex64::new(x.sin() * (-x).exp(), 0.0)).collect();
    let r = check_real_reduction(&real, 0.01);
    assert_eq!(r.phase, 0.0);
    assert_eq!(r.residual_imag, 0.0);
    assert_eq!(r.max_wronskian, 0.0);
    let theta = 0.7;
    let rot: Vec<Complex64> = real.iter().map(|z| z * Complex64::from_polar(1.0, theta)).collect();
    let r = check_real_reduction(&rot, 0.01);
    assert!((r.phase - theta).abs() < 1e-12);
    assert!(r.residual_imag <= 1e-12);
    let twisted: Vec<Complex64> = xs.iter().zip(&real).map(|(x, z)| z * Complex64::from_polar(1.0, *x)).collect();
    assert!(check_real_reduction(&twisted, 0.01).max_wronskian > 1e-3);
}

#[test]
fn reconstructed_profile_has_vanishing_wronskian() {
    let p = params();
    let grid = default_p_grid(Regime::Focusing, 10, 5, 1e-6);
    let states = solve_branch(Regime::Focusing, 1, &p, &grid, &BranchOptions::default()).unwrap();
    let s = &states[states.len() / 2];
    let dx = 0.005;
    let psi: Vec<Complex64> =
        (0..2000).map(|j| Complex64::from_polar(s.profile(j as f64 * dx), -1.2)).collect();
    let r = check_real_reduction(&psi, dx);
    let sup = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(r.max_wronskian <= 1e-14 * sup * sup / dx);
    assert!((r.phase + 1.2).abs() < 1e-12);
}
