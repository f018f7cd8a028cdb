use super::effective::{two_p2_minus_one, EffectiveEquation, Regime};
use super::state::{reconstruct, StationaryState};
use crate::error::{Error, Result};
use crate::linear::ModelParams;
use crate::specfun::EllipticModulus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

/// Search settings of the `lambda'` scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchOptions {
    /// Initial scan ceiling; `20 / a` when absent.
    pub lambda_prime_max: Option<f64>,
    /// How often the ceiling may be doubled while new roots keep appearing in the last octave.
    pub max_doublings: usize,
    /// Scan points per quarter period of the interior argument.
    pub points_per_quarter_period: usize,
    /// Minimum number of scan points over the initial range.
    pub min_points: usize,
    /// Polishing target for `|H|`.
    pub residual_tol: f64,
}

impl Default for BranchOptions {
    fn default() -> Self {
        Self { lambda_prime_max: None, max_doublings: 3, points_per_quarter_period: 24, min_points: 600, residual_tol: 1e-12 }
    }
}

/// Bisection safeguarded secant iteration for a bracketed root of `f`.
///
/// Stops when `|f| <= tol` or the bracket cannot be split further and returns the abscissa with
/// the smallest `|f|` seen together with that value. Returns `None` when `f` is not finite inside
/// the bracket or the sign change turns out to be a jump rather than a root.
pub(crate) fn bracketed_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Option<(f64, f64)> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    let mut best = if flo.abs() < fhi.abs() { (lo, flo) } else { (hi, fhi) };
    for it in 0..200 {
        if best.1.abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let secant = hi - fhi * (hi - lo) / (fhi - flo);
        let x = if it % 3 != 2 && secant > lo && secant < hi && secant.is_finite() {
            // Keep secant steps away from the bracket ends to guarantee shrinkage.
            let margin = 1e-3 * (hi - lo);
            secant.clamp(lo + margin, hi - margin)
        } else {
            mid
        };
        let fx = f(x);
        if !fx.is_finite() {
            return None;
        }
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx == 0.0 {
            break;
        }
        if (fx < 0.0) == (flo < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    let jump_scale = 1e-8 * (1.0 + flo.abs().min(fhi.abs()));
    if best.1.abs() <= tol.max(jump_scale) {
        Some(best)
    } else {
        None
    }
}

/// All roots `lambda'` of the effective equation at one modulus, in increasing order.
pub fn effective_roots(
    regime: Regime,
    ell: u8,
    m: EllipticModulus,
    params: &ModelParams,
    opts: &BranchOptions,
) -> Result<Vec<f64>> {
    let eq = EffectiveEquation::new(regime, m, params)?;
    let a = params.a;
    let mut top = opts.lambda_prime_max.unwrap_or(20.0 / a);
    if !(top > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda_prime_max must be positive, got {top}")));
    }
    let k = eq.quarter_period();
    // Defocusing profiles need lambda a < K, that is lambda' < K / (u a).
    let regular_limit = match regime {
        Regime::Focusing => f64::INFINITY,
        Regime::Defocusing => k / (eq.factor() * a),
    };
    let dv = if k.is_finite() { k / opts.points_per_quarter_period as f64 } else { 0.05 };
    let f = |lp: f64| -> Option<f64> { eq.reduced(lp, ell).ok().flatten() };
    let mut roots = Vec::new();
    let mut lo_edge = 0.0;
    let mut doublings = 0;
    loop {
        let hi_edge = top.min(regular_limit * (1.0 - 1e-12));
        if hi_edge > lo_edge {
            let span = hi_edge - lo_edge;
            let by_period = (span * eq.factor() * a / dv).ceil() as usize;
            let n = by_period.max(opts.min_points).max(2);
            let step = span / n as f64;
            let mut prev: Option<(f64, f64)> = None;
            for i in 0..=n {
                let lp = if i == 0 && lo_edge == 0.0 { 0.5 * step } else { lo_edge + step * i as f64 };
                let cur = f(lp).map(|v| (lp, v));
                if let (Some((x0, f0)), Some((x1, f1))) = (prev, cur) {
                    if f0 == 0.0 {
                        roots.push(x0);
                    } else if (f0 < 0.0) != (f1 < 0.0) && f1 != 0.0 {
                        if let Some((r, _)) =
                            bracketed_root(|x| f(x).unwrap_or(f64::NAN), x0, x1, opts.residual_tol)
                        {
                            roots.push(r);
                        }
                    }
                }
                prev = cur;
            }
        }
        let new_in_last_octave = roots.iter().any(|&r| r > 0.5 * top);
        if !new_in_last_octave || doublings >= opts.max_doublings || top >= regular_limit {
            break;
        }
        lo_edge = top;
        top *= 2.0;
        doublings += 1;
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * x.abs());
    Ok(roots)
}

/// Solves the effective equation on every modulus of `p_grid` and reconstructs the states,
/// sorted by `Omega`.
///
/// Moduli outside the regime's domain are skipped; roots whose profile cannot be realised
/// (defocusing pole inside the domain or in the tail) are dropped. A root whose reconstruction
/// fails to match continuity is an internal-consistency error.
pub fn solve_branch(
    regime: Regime,
    ell: u8,
    params: &ModelParams,
    p_grid: &[EllipticModulus],
    opts: &BranchOptions,
) -> Result<Vec<StationaryState>> {
    params.validate()?;
    super::effective::ell_sign(ell)?;
    let per_p: Vec<Result<Vec<StationaryState>>> = p_grid
        .par_iter()
        .map(|&m| {
            if !in_domain(regime, m) {
                return Ok(Vec::new());
            }
            let roots = effective_roots(regime, ell, m, params, opts)?;
            let mut out = Vec::with_capacity(roots.len());
            for lp in roots {
                match reconstruct(regime, ell, m, lp, params) {
                    Ok(s) => out.push(s),
                    Err(Error::Pole(_)) | Err(Error::Divergent(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(out)
        })
        .collect();
    let mut states = Vec::new();
    for r in per_p {
        states.extend(r?);
    }
    states.sort_by(|x, y| x.omega.total_cmp(&y.omega).then(x.p.pc().total_cmp(&y.p.pc())));
    Ok(states)
}

/// Whether a modulus lies in the open parameter domain of the regime.
pub fn in_domain(regime: Regime, m: EllipticModulus) -> bool {
    match regime {
        Regime::Focusing => two_p2_minus_one(m) > 0.0 && m.pc() > 0.0,
        Regime::Defocusing => m.pc() > 0.0,
    }
}

/// Default modulus grid: `n_linear` equispaced values of `p` and `n_log` log-spaced values of
/// `pc` down to `pc_min`.
pub fn default_p_grid(regime: Regime, n_linear: usize, n_log: usize, pc_min: f64) -> Vec<EllipticModulus> {
    let mut grid = Vec::new();
    let (p_lo, p_hi) = match regime {
        Regime::Focusing => (FRAC_1_SQRT_2 + 1e-3, 0.99),
        Regime::Defocusing => (0.0, 0.99),
    };
    for i in 0..n_linear {
        let t = if n_linear == 1 { 0.0 } else { i as f64 / (n_linear - 1) as f64 };
        grid.push(EllipticModulus::new(p_lo + (p_hi - p_lo) * t).expect("grid modulus in range"));
    }
    let (l_hi, l_lo) = ((0.1f64).ln(), pc_min.ln());
    for i in 0..n_log {
        let t = if n_log == 1 { 0.0 } else { i as f64 / (n_log - 1) as f64 };
        grid.push(EllipticModulus::from_complement((l_hi + (l_lo - l_hi) * t).exp()).expect("grid modulus in range"));
    }
    grid
}
