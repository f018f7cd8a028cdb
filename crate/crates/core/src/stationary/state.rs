use super::effective::{ell_sign, EffectiveEquation, Regime};
use crate::error::{Error, Result};
use crate::linear::ModelParams;
use crate::quad::integrate;
use crate::specfun::{EllipticModulus, JacobiEvaluator};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// A real stationary state of the cubic equation, `C cn(lambda (x - x0), p)` (focusing) or
/// `C cs(lambda (x - x0), p)` (defocusing) on `(0, a)` and `C' sech(lambda' (x - x0'))` or
/// `C' cosech(lambda' (x - x0'))` on `(a, inf)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryState {
    pub regime: Regime,
    pub ell: u8,
    pub params: ModelParams,
    pub p: EllipticModulus,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub x0: f64,
    pub x0_prime: f64,
    /// `lambda' (a - x0')`, kept separately because `x0'` can be far from `a`.
    pub tail_phase: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_prime")]
    pub c_prime: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub mu_sq: f64,
    pub eta: f64,
}

fn arcsech(s: f64) -> f64 {
    ((1.0 + ((1.0 - s) * (1.0 + s)).sqrt()) / s).ln()
}

/// Builds the full state from a root `(p, lambda')` of the effective equation.
///
/// `C > 0`; the sign of `C'` follows from continuity at `x = a`; the tail phase is
/// `(-1)^ell arcsech(s)` (focusing) or `arcsinh(1/s)` (defocusing, `ell = 2` only) with `s` the
/// amplitude ratio fixed by continuity. The norm is computed with [`norm_mu_sq`].
pub fn reconstruct(
    regime: Regime,
    ell: u8,
    m: EllipticModulus,
    lambda_prime: f64,
    params: &ModelParams,
) -> Result<StationaryState> {
    let sign = ell_sign(ell)?;
    if m.pc() == 0.0 {
        return Err(Error::Domain("states need p < 1 (x0 = K(p)/lambda is infinite at p = 1)".into()));
    }
    if !(lambda_prime > 0.0) {
        return Err(Error::Domain(format!("lambda' must be positive, got {lambda_prime}")));
    }
    let eq = EffectiveEquation::new(regime, m, params)?;
    let lambda = eq.lambda(lambda_prime);
    let k = eq.quarter_period();
    let x0 = k / lambda;
    let s = eq.sample(lambda_prime);
    let pc = m.pc();
    let (c, interior_at_a, ratio) = match regime {
        Regime::Focusing => {
            let c = SQRT_2 * m.p() * lambda;
            let phi_a = c * pc * s.sn / s.dn;
            (c, phi_a, (m.p() * eq.factor() * pc * s.sn / s.dn).abs())
        }
        Regime::Defocusing => {
            if !eq.interior_regular(lambda_prime) {
                return Err(Error::Pole(format!(
                    "cs profile has a pole inside (0, a): lambda a = {} >= K = {k}",
                    lambda * params.a
                )));
            }
            let c = SQRT_2 * lambda;
            let phi_a = -c * pc * s.sn / s.cn;
            (c, phi_a, (eq.factor() * pc * s.sn / s.cn).abs())
        }
    };
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::Numerical(format!("profile vanishes at x = a (ratio {ratio}); tail cannot be matched")));
    }
    let tail_phase = match regime {
        Regime::Focusing => {
            if ratio > 1.0 + 1e-12 {
                return Err(Error::Numerical(format!(
                    "continuity at x = a cannot be matched: sech of the tail phase would be {ratio}"
                )));
            }
            sign * arcsech(ratio.min(1.0))
        }
        Regime::Defocusing => {
            if ell != 2 {
                return Err(Error::Pole("defocusing ell = 1 places the cosech pole inside (a, inf)".into()));
            }
            (1.0 / ratio).asinh()
        }
    };
    let c_prime = interior_at_a.signum() * SQRT_2 * lambda_prime;
    let mut state = StationaryState {
        regime,
        ell,
        params: *params,
        p: m,
        lambda,
        lambda_prime,
        x0,
        x0_prime: params.a - tail_phase / lambda_prime,
        tail_phase,
        c,
        c_prime,
        omega: -lambda_prime * lambda_prime,
        mu_sq: 0.0,
        eta: 0.0,
    };
    state.mu_sq = norm_mu_sq(&state)?;
    state.eta = regime.g() * state.mu_sq;
    Ok(state)
}

impl StationaryState {
    fn evaluator(&self) -> JacobiEvaluator {
        JacobiEvaluator::new(self.p)
    }

    /// Profile value and derivative at `x > 0` (interior formula for `x < a`).
    pub fn profile_with(&self, ev: &JacobiEvaluator, x: f64) -> (f64, f64) {
        if x < self.params.a {
            self.interior(ev, x)
        } else {
            self.exterior(x)
        }
    }

    /// Interior formula (valid on `(0, a)`, extended analytically) and its derivative.
    pub fn interior(&self, ev: &JacobiEvaluator, x: f64) -> (f64, f64) {
        let t = ev.eval(self.lambda * x);
        let pc = self.p.pc();
        match self.regime {
            Regime::Focusing => {
                (self.c * pc * t.sn / t.dn, self.c * pc * self.lambda * t.cn / (t.dn * t.dn))
            }
            Regime::Defocusing => {
                (-self.c * pc * t.sn / t.cn, -self.c * pc * self.lambda * t.dn / (t.cn * t.cn))
            }
        }
    }

    /// Exterior formula (valid on `(a, inf)`) and its derivative.
    pub fn exterior(&self, x: f64) -> (f64, f64) {
        let z = self.lambda_prime * (x - self.params.a) + self.tail_phase;
        match self.regime {
            Regime::Focusing => {
                let sech = 1.0 / z.cosh();
                (self.c_prime * sech, -self.c_prime * self.lambda_prime * sech * z.tanh())
            }
            Regime::Defocusing => {
                let csch = 1.0 / z.sinh();
                (self.c_prime * csch, -self.c_prime * self.lambda_prime * csch / z.tanh())
            }
        }
    }

    /// The profile `phi(x)` (zero for `x <= 0`).
    pub fn profile(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.profile_with(&self.evaluator(), x).0
    }

    /// Samples the profile at `x_j = j dx`, `j = 0..n`.
    pub fn sample(&self, dx: f64, n: usize) -> Vec<f64> {
        let ev = self.evaluator();
        (0..n).map(|j| if j == 0 { 0.0 } else { self.profile_with(&ev, j as f64 * dx).0 }).collect()
    }

    /// Residuals of the defining relations.
    pub fn invariants(&self) -> StateInvariants {
        let ev = self.evaluator();
        let (p, pc) = (self.p.p(), self.p.pc());
        let lp2 = self.lambda_prime * self.lambda_prime;
        let l2 = self.lambda * self.lambda;
        let parameter_residual = match self.regime {
            Regime::Focusing => [
                (self.c * self.c - 2.0 * p * p * l2).abs() / (self.c * self.c),
                (self.c_prime * self.c_prime - 2.0 * lp2).abs() / (2.0 * lp2),
                ((p - pc) * (p + pc) * l2 - lp2).abs() / lp2,
                (self.omega + lp2).abs() / lp2,
            ],
            Regime::Defocusing => [
                (self.c * self.c - 2.0 * l2).abs() / (self.c * self.c),
                (self.c_prime * self.c_prime - 2.0 * lp2).abs() / (2.0 * lp2),
                ((1.0 + pc * pc) * l2 - lp2).abs() / lp2,
                (self.omega + lp2).abs() / lp2,
            ],
        }
        .into_iter()
        .fold(0.0, f64::max);
        let k = ev.quarter_period();
        let k_condition_residual = (self.lambda * self.x0 - k).abs() / k;
        let a = self.params.a;
        let (left, dleft) = self.interior(&ev, a);
        let (right, dright) = self.exterior(a);
        let scale = 1.0f64.max(left.abs()).max(right.abs());
        let continuity_error = (right - left).abs() / scale;
        let jump = dright - dleft - self.params.alpha * left;
        let dscale = 1.0f64.max(dleft.abs()).max(dright.abs()).max((self.params.alpha * left).abs());
        let jump_error = jump.abs() / dscale;
        let tail_sign_consistent = match self.regime {
            Regime::Focusing => (self.tail_phase.tanh() >= 0.0) == (self.ell == 2),
            Regime::Defocusing => self.tail_phase > 0.0,
        };
        StateInvariants {
            parameter_residual,
            k_condition_residual,
            continuity_error,
            jump_error,
            ode_residual: self.ode_residual(&ev),
            tail_sign_consistent,
        }
    }

    /// Relative finite-difference residual of `-phi'' + g phi^3 - Omega phi` on both sides of `a`.
    fn ode_residual(&self, ev: &JacobiEvaluator) -> f64 {
        let a = self.params.a;
        let g = self.regime.g();
        let h = 0.01 / self.lambda.max(self.lambda_prime);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        let mut check = |x: f64, interior: bool| {
            let f = |y: f64| if interior { self.interior(ev, y).0 } else { self.exterior(y).0 };
            let (fm2, fm1, f0, fp1, fp2) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
            let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
            let r = -d2 + g * f0 * f0 * f0 - self.omega * f0;
            worst = worst.max(r.abs());
            scale = scale.max(d2.abs()).max((f0 * f0 * f0).abs()).max((self.omega * f0).abs());
        };
        let n = 200;
        for i in 1..n {
            let x = a * i as f64 / n as f64;
            if x > 2.0 * h && x < a - 2.0 * h {
                check(x, true);
            }
        }
        let span = 12.0 / self.lambda_prime + self.tail_phase.min(0.0).abs() / self.lambda_prime;
        for i in 1..=n {
            let x = a + span * i as f64 / n as f64;
            if x > a + 2.0 * h {
                check(x, false);
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }
}

/// Residuals of a reconstructed state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateInvariants {
    /// Largest relative residual among the amplitude, frequency and `Omega` relations.
    pub parameter_residual: f64,
    /// `|lambda x0 - K| / K`.
    pub k_condition_residual: f64,
    /// `|phi(a+) - phi(a-)|` relative to `max(1, |phi(a)|)`.
    pub continuity_error: f64,
    /// `|phi'(a+) - phi'(a-) - alpha phi(a)|` relative to the largest term (at least 1).
    pub jump_error: f64,
    /// Finite-difference residual of the stationary equation relative to its largest term.
    pub ode_residual: f64,
    /// Focusing: `tanh` of the tail phase has sign `(-1)^ell`; defocusing: the tail phase is positive.
    pub tail_sign_consistent: bool,
}

impl StateInvariants {
    /// The acceptance thresholds: relations and `K` condition to `1e-10`, continuity and jump to
    /// `1e-8`, ODE residual to `1e-6`, and a consistent tail sign.
    pub fn passes(&self) -> bool {
        self.parameter_residual <= 1e-10
            && self.k_condition_residual <= 1e-10
            && self.continuity_error <= 1e-8
            && self.jump_error <= 1e-8
            && self.ode_residual <= 1e-6
            && self.tail_sign_consistent
    }
}

/// `mu^2 = int_0^inf phi^2`: adaptive quadrature on `(0, a)` plus the closed-form tail
/// `(C'^2/lambda') (1 - tanh(lambda'(a - x0')))` (focusing) or
/// `(C'^2/lambda') (coth(lambda'(a - x0')) - 1)` (defocusing).
pub fn norm_mu_sq(state: &StationaryState) -> Result<f64> {
    let a = state.params.a;
    let ev = state.evaluator();
    let k = ev.quarter_period();
    if state.regime == Regime::Defocusing && state.lambda * a >= k {
        return Err(Error::Divergent("cs profile has a pole inside (0, a); the norm diverges".into()));
    }
    // Breakpoints at the extrema of the interior profile.
    let mut breaks = Vec::new();
    let mut j = 1.0;
    while (j * k / state.lambda) < a && breaks.len() < 10_000 {
        breaks.push(j * k / state.lambda);
        j += 1.0;
    }
    let interior = integrate(|x: f64| state.interior(&ev, x).0.powi(2), 0.0, a, &breaks, 0.0, 1e-13)?;
    let lp = state.lambda_prime;
    let z = state.tail_phase;
    let tail = match state.regime {
        Regime::Focusing => state.c_prime * state.c_prime / lp * 2.0 / (1.0 + (2.0 * z).exp()),
        Regime::Defocusing => state.c_prime * state.c_prime / lp * 2.0 / (2.0 * z).exp_m1(),
    };
    let mu = interior.value + tail;
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Numerical(format!("non-positive or non-finite norm {mu}")));
    }
    Ok(mu)
}

/// Whole-domain adaptive quadrature of `phi^2` (tail truncated where `phi^2 < 1e-300`), an
/// independent check of [`norm_mu_sq`].
pub fn norm_mu_sq_quadrature(state: &StationaryState) -> Result<f64> {
    let a = state.params.a;
    let ev = state.evaluator();
    let inner = integrate(|x: f64| state.interior(&ev, x).0.powi(2), 0.0, a, &[], 0.0, 1e-13)?;
    let z0 = state.tail_phase;
    let end = a + (350.0 - z0.min(0.0)) / state.lambda_prime;
    let peak = a - z0 / state.lambda_prime;
    let mut breaks = Vec::new();
    if peak > a && peak < end {
        breaks.push(peak);
    }
    let outer = integrate(|x: f64| state.exterior(x).0.powi(2), a, end, &breaks, 0.0, 1e-13)?;
    Ok(inner.value + outer.value)
}
