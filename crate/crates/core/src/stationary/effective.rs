use crate::error::{Error, Result};
use crate::linear::ModelParams;
use crate::specfun::{EllipticModulus, JacobiEvaluator};
use serde::{Deserialize, Serialize};

/// Sign of the cubic term: focusing (`g = -1`, attractive) or defocusing (`g = +1`, repulsive).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Focusing,
    Defocusing,
}

impl Regime {
    /// The coupling sign `g`.
    pub fn g(self) -> f64 {
        match self {
            Regime::Focusing => -1.0,
            Regime::Defocusing => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Focusing => "focusing",
            Regime::Defocusing => "defocusing",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "focusing" => Ok(Regime::Focusing),
            "defocusing" => Ok(Regime::Defocusing),
            _ => Err(Error::InvalidParameter(format!("unknown regime '{s}' (expected focusing or defocusing)"))),
        }
    }
}

/// `(-1)^ell` for `ell` in `{1, 2}`.
pub fn ell_sign(ell: u8) -> Result<f64> {
    match ell {
        1 => Ok(-1.0),
        2 => Ok(1.0),
        _ => Err(Error::InvalidParameter(format!("ell must be 1 or 2, got {ell}"))),
    }
}

/// `2p^2 - 1` evaluated as `(p - pc)(p + pc)` to keep relative accuracy.
pub(crate) fn two_p2_minus_one(m: EllipticModulus) -> f64 {
    (m.p() - m.pc()) * (m.p() + m.pc())
}

/// The effective scalar equation at one fixed modulus, prepared for repeated evaluation in `lambda'`.
///
/// With `v = lambda' f(p) a` (`f = w = 1/sqrt(2p^2 - 1)` focusing, `f = u = 1/sqrt(2 - p^2)`
/// defocusing) the identities `cn(v - K) = pc sd(v)`, `sn(v - K) = -cd(v)` and
/// `dn(v - K) = pc nd(v)` turn the effective functions into `H = pc * Hr` with
///
/// * focusing: `Hr = sd(v) [lambda' (-1)^ell T + alpha] + lambda' w cn(v)/dn(v)^2`,
///   `T^2 = 1 - p^2 w^2 pc^2 sd(v)^2`;
/// * defocusing: `Hr = sd(v) [lambda' (-1)^ell sqrt(1 + u^2 pc^2 sc(v)^2) + alpha] + lambda' u / cn(v)`.
///
/// `Hr` stays finite and nondegenerate as `p -> 1`, where both reduce to
/// `sinh(lambda' a) [(-1)^ell lambda' + alpha] + lambda' cosh(lambda' a)`.
#[derive(Clone, Debug)]
pub struct EffectiveEquation {
    regime: Regime,
    m: EllipticModulus,
    factor: f64,
    k: f64,
    ev: JacobiEvaluator,
    a: f64,
    alpha: f64,
}

/// Jacobi values at `v` needed by the effective equation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Sample {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

impl EffectiveEquation {
    /// Prepares the equation; focusing needs `1/sqrt(2) < p <= 1`, defocusing `0 <= p <= 1`.
    pub fn new(regime: Regime, m: EllipticModulus, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let factor = match regime {
            Regime::Focusing => {
                let d = two_p2_minus_one(m);
                if !(d > 0.0) {
                    return Err(Error::Domain(format!(
                        "focusing states need p > 1/sqrt(2), got p = {} (Omega would be non-negative)",
                        m.p()
                    )));
                }
                1.0 / d.sqrt()
            }
            Regime::Defocusing => 1.0 / (1.0 + m.pc() * m.pc()).sqrt(),
        };
        let ev = JacobiEvaluator::new(m);
        Ok(Self { regime, m, factor, k: ev.quarter_period(), ev, a: params.a, alpha: params.alpha })
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn modulus(&self) -> EllipticModulus {
        self.m
    }

    /// `w(p)` (focusing) or `u(p)` (defocusing).
    pub fn factor(&self) -> f64 {
        self.factor
    }

    /// Quarter period `K(p)` (infinite at `p = 1`).
    pub fn quarter_period(&self) -> f64 {
        self.k
    }

    /// Interior frequency `lambda = lambda' f(p)`.
    pub fn lambda(&self, lambda_prime: f64) -> f64 {
        lambda_prime * self.factor
    }

    pub(crate) fn sample(&self, lambda_prime: f64) -> Sample {
        let t = self.ev.eval(self.lambda(lambda_prime) * self.a);
        Sample { sn: t.sn, cn: t.cn, dn: t.dn }
    }

    pub(crate) fn evaluator(&self) -> &JacobiEvaluator {
        &self.ev
    }

    /// Whether the interior profile is free of poles (`lambda a < K`); always true when focusing.
    pub fn interior_regular(&self, lambda_prime: f64) -> bool {
        match self.regime {
            Regime::Focusing => true,
            Regime::Defocusing => self.lambda(lambda_prime) * self.a < self.k,
        }
    }

    /// Squared tail amplitude ratio: `sech^2` of the tail phase (focusing) or `cosech^2` (defocusing).
    pub(crate) fn tail_ratio_sq(&self, s: &Sample) -> f64 {
        let pc = self.m.pc();
        match self.regime {
            Regime::Focusing => {
                let r = self.m.p() * self.factor * pc * s.sn / s.dn;
                r * r
            }
            Regime::Defocusing => {
                let r = self.factor * pc * s.sn / s.cn;
                r * r
            }
        }
    }

    /// Reduced value `Hr = H / pc` for the branch with tail slope sign `tau`.
    ///
    /// `tau` is `tanh` of the tail phase (focusing) or its `coth` (defocusing); on solutions it
    /// equals `(-1)^ell T` with `T` the square root appearing in `H`.
    pub(crate) fn reduced_with_tau(&self, lambda_prime: f64, tau: f64, s: &Sample) -> f64 {
        let sd = s.sn / s.dn;
        match self.regime {
            Regime::Focusing => sd * (lambda_prime * tau + self.alpha) + lambda_prime * self.factor * s.cn / (s.dn * s.dn),
            Regime::Defocusing => sd * (lambda_prime * tau + self.alpha) + lambda_prime * self.factor / s.cn,
        }
    }

    /// Smooth form of the effective system in the unknowns `(lambda', tau)`:
    /// `F1 = Hr` with the square root replaced by `tau`, and
    /// `F2 = tau^2 + sech^2 - 1` (focusing) or `tau^2 - cosech^2 - 1` (defocusing).
    pub(crate) fn smooth_system(&self, lambda_prime: f64, tau: f64) -> (f64, f64) {
        let s = self.sample(lambda_prime);
        let r2 = self.tail_ratio_sq(&s);
        let f2 = match self.regime {
            Regime::Focusing => tau * tau + r2 - 1.0,
            Regime::Defocusing => tau * tau - r2 - 1.0,
        };
        (self.reduced_with_tau(lambda_prime, tau, &s), f2)
    }

    /// `T = sqrt(1 - sech^2)` (focusing) or `sqrt(1 + cosech^2)` (defocusing); `None` when negative.
    pub(crate) fn root_term(&self, s: &Sample) -> Option<f64> {
        let r2 = self.tail_ratio_sq(s);
        let t2 = match self.regime {
            Regime::Focusing => (1.0 - r2.sqrt()) * (1.0 + r2.sqrt()),
            Regime::Defocusing => 1.0 + r2,
        };
        if t2 < 0.0 {
            None
        } else {
            Some(t2.sqrt())
        }
    }

    /// Reduced effective function `H / pc`; `Ok(None)` where the square root is not real.
    pub fn reduced(&self, lambda_prime: f64, ell: u8) -> Result<Option<f64>> {
        let sign = ell_sign(ell)?;
        let s = self.sample(lambda_prime);
        if self.regime == Regime::Defocusing && s.cn == 0.0 {
            return Err(Error::Pole(format!("sn(u*) = 0 at lambda' = {lambda_prime}")));
        }
        Ok(self.root_term(&s).map(|t| self.reduced_with_tau(lambda_prime, sign * t, &s)))
    }

    /// `H = pc * Hr`.
    pub fn value(&self, lambda_prime: f64, ell: u8) -> Result<Option<f64>> {
        Ok(self.reduced(lambda_prime, ell)?.map(|h| h * self.m.pc()))
    }
}

fn check_lambda_prime(lambda_prime: f64) -> Result<()> {
    if !(lambda_prime > 0.0) || !lambda_prime.is_finite() {
        return Err(Error::Domain(format!("lambda' must be positive, got {lambda_prime}")));
    }
    Ok(())
}

/// Focusing effective function
/// `H = cn(u*) [lambda' (-1)^ell sqrt(1 - p^2 w^2 cn(u*)^2) + alpha] - lambda' w sn(u*) dn(u*)`
/// with `u* = lambda' w a - K(p)`, evaluated term by term at `u*`.
///
/// Returns `Ok(None)` when the square-root argument is negative (not admissible).
pub fn h_focusing(m: EllipticModulus, lambda_prime: f64, ell: u8, params: &ModelParams) -> Result<Option<f64>> {
    check_lambda_prime(lambda_prime)?;
    let sign = ell_sign(ell)?;
    let eq = EffectiveEquation::new(Regime::Focusing, m, params)?;
    if m.pc() == 0.0 {
        return Ok(Some(0.0));
    }
    let w = eq.factor();
    let u_star = lambda_prime * w * params.a - eq.quarter_period();
    let t = eq.evaluator().eval(u_star);
    let arg = 1.0 - m.p() * m.p() * w * w * t.cn * t.cn;
    if arg < 0.0 {
        return Ok(None);
    }
    Ok(Some(t.cn * (lambda_prime * sign * arg.sqrt() + params.alpha) - lambda_prime * w * t.sn * t.dn))
}

/// Reduced focusing function `H / pc`, finite at `p = 1`; `Ok(None)` when not admissible.
pub fn h_focusing_reduced(m: EllipticModulus, lambda_prime: f64, ell: u8, params: &ModelParams) -> Result<Option<f64>> {
    check_lambda_prime(lambda_prime)?;
    EffectiveEquation::new(Regime::Focusing, m, params)?.reduced(lambda_prime, ell)
}

/// Defocusing effective function
/// `H = cn(u*) [lambda' (-1)^ell sqrt(1 + u^2 cs(u*)^2) + alpha] - u lambda' dn(u*)/sn(u*)`
/// with `u* = u(p) lambda' a - K(p)`, evaluated term by term at `u*`. Needs `p < 1`.
pub fn h_defocusing(m: EllipticModulus, lambda_prime: f64, ell: u8, params: &ModelParams) -> Result<f64> {
    check_lambda_prime(lambda_prime)?;
    let sign = ell_sign(ell)?;
    if m.pc() == 0.0 {
        return Err(Error::Domain("defocusing effective function needs p < 1".into()));
    }
    let eq = EffectiveEquation::new(Regime::Defocusing, m, params)?;
    let u = eq.factor();
    let u_star = u * lambda_prime * params.a - eq.quarter_period();
    let t = eq.evaluator().eval(u_star);
    if t.sn.abs() <= 4.0 * f64::EPSILON * (1.0 + u_star.abs()) {
        return Err(Error::Pole(format!("sn(u*) = 0 at u* = {u_star}: the profile is singular at x = a")));
    }
    let cs = t.cn / t.sn;
    Ok(t.cn * (lambda_prime * sign * (1.0 + u * u * cs * cs).sqrt() + params.alpha) - u * lambda_prime * t.dn / t.sn)
}

/// Reduced defocusing function `H / pc`, finite at `p = 1`.
pub fn h_defocusing_reduced(m: EllipticModulus, lambda_prime: f64, ell: u8, params: &ModelParams) -> Result<f64> {
    check_lambda_prime(lambda_prime)?;
    let eq = EffectiveEquation::new(Regime::Defocusing, m, params)?;
    Ok(eq.reduced(lambda_prime, ell)?.expect("defocusing square root is always real"))
}
