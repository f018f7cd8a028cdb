use super::effective::{two_p2_minus_one, EffectiveEquation, Regime};
use super::state::{reconstruct, StationaryState};
use crate::error::{Error, Result};
use crate::linear::ModelParams;
use crate::specfun::EllipticModulus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

/// A saddle-node point: `H = 0` and `dH/dp = 0` at the same `(p, lambda')`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    /// 1-based index in order of decreasing `eta` (set by [`find_all_bifurcations`]).
    pub n: usize,
    pub regime: Regime,
    pub ell: u8,
    pub eta_n: f64,
    #[serde(rename = "Omega_n")]
    pub omega_n: f64,
    pub p: EllipticModulus,
    pub lambda_prime: f64,
    /// `|H|` at the point.
    pub residual_h: f64,
    /// `|dH/dp|` at the point.
    pub residual_hp: f64,
    pub state: StationaryState,
}

/// Rectangle of `(p, lambda')` searched for saddle-node points and its seeding grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub p_min: f64,
    pub p_max: f64,
    pub lambda_prime_min: f64,
    pub lambda_prime_max: f64,
    pub n_p: usize,
    pub n_lambda_prime: usize,
}

impl SearchBox {
    /// `p` in `(1/sqrt(2), 0.999]`, `lambda'` in `[0.05/a, 20/a]`, on a 200 x 400 grid.
    pub fn default_for(params: &ModelParams) -> Self {
        Self {
            p_min: FRAC_1_SQRT_2 + 2e-3,
            p_max: 0.999,
            lambda_prime_min: 0.05 / params.a,
            lambda_prime_max: 20.0 / params.a,
            n_p: 200,
            n_lambda_prime: 400,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.p_min < self.p_max
            && self.p_min >= 0.0
            && self.p_max < 1.0
            && self.lambda_prime_min > 0.0
            && self.lambda_prime_min < self.lambda_prime_max
            && self.n_p >= 2
            && self.n_lambda_prime >= 2;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid search box {self:?}")))
        }
    }
}

/// Reduced function `H / pc` and its `p`-derivative at one modulus, sharing the setup cost of
/// the Jacobi evaluators across many `lambda'`.
struct Column {
    center: Option<EffectiveEquation>,
    // Evaluators at p - h, p + h, p - h/2, p + h/2.
    shifted: Option<[EffectiveEquation; 4]>,
    h: f64,
}

fn derivative_step(regime: Regime, p: f64) -> f64 {
    let lower = match regime {
        Regime::Focusing => p - FRAC_1_SQRT_2,
        Regime::Defocusing => p,
    };
    let mut h = 2e-4f64.min(0.125 * (1.0 - p));
    if lower > 0.0 {
        h = h.min(0.125 * lower);
    }
    h
}

impl Column {
    fn new(regime: Regime, p: f64, params: &ModelParams) -> Self {
        let make = |q: f64| EllipticModulus::new(q).ok().and_then(|m| EffectiveEquation::new(regime, m, params).ok());
        let h = derivative_step(regime, p);
        let shifted = match (make(p - h), make(p + h), make(p - 0.5 * h), make(p + 0.5 * h)) {
            (Some(a), Some(b), Some(c), Some(d)) => Some([a, b, c, d]),
            _ => None,
        };
        Self { center: make(p), shifted, h }
    }

    fn value(&self, lp: f64, ell: u8) -> Option<f64> {
        self.center.as_ref()?.reduced(lp, ell).ok().flatten()
    }

    /// `d(H/pc)/dp` along the `ell`-branch by implicit differentiation of the smooth system:
    /// `dHr/dp = F1_p - F1_tau F2_p / F2_tau`, with Richardson-extrapolated central differences
    /// for the partial derivatives at fixed `(lambda', tau)`.
    fn dp(&self, lp: f64, ell: u8) -> Option<f64> {
        let center = self.center.as_ref()?;
        let [m1, p1, m2, p2] = self.shifted.as_ref()?;
        let s = center.sample(lp);
        let tau = super::effective::ell_sign(ell).ok()? * center.root_term(&s)?;
        let (a1, a2) = m1.smooth_system(lp, tau);
        let (b1, b2) = p1.smooth_system(lp, tau);
        let (c1, c2) = m2.smooth_system(lp, tau);
        let (d1, d2) = p2.smooth_system(lp, tau);
        let rich = |lo: f64, hi: f64, lo2: f64, hi2: f64| {
            let wide = (hi - lo) / (2.0 * self.h);
            let narrow = (hi2 - lo2) / self.h;
            (4.0 * narrow - wide) / 3.0
        };
        let f1_p = rich(a1, b1, c1, d1);
        let f2_p = rich(a2, b2, c2, d2);
        let sd = s.sn / s.dn;
        let f1_tau = sd * lp;
        let f2_tau = 2.0 * tau;
        if f2_tau == 0.0 {
            return None;
        }
        Some(f1_p - f1_tau * f2_p / f2_tau)
    }
}

/// `(H/pc, d(H/pc)/dp)` at `(p, lambda')`.
fn system(regime: Regime, ell: u8, p: f64, lp: f64, params: &ModelParams) -> Option<(f64, f64)> {
    let col = Column::new(regime, p, params);
    Some((col.value(lp, ell)?, col.dp(lp, ell)?))
}

/// `dH/dp` at `(p, lambda')` for the literal effective function `H = pc Hr`:
/// `dH/dp = pc dHr/dp - (p/pc) Hr`, with `dHr/dp` from implicit differentiation of the smooth
/// system in `(p, lambda', tau)` (the square root in `H` makes direct differences ill-conditioned
/// near the points where it vanishes).
pub fn h_p_derivative(regime: Regime, ell: u8, m: EllipticModulus, lambda_prime: f64, params: &ModelParams) -> Result<f64> {
    super::effective::ell_sign(ell)?;
    let p = m.p();
    let col = Column::new(regime, p, params);
    let not_adm = || Error::Domain(format!("effective function not admissible or not differentiable at p = {p}"));
    let hr = col.value(lambda_prime, ell).ok_or_else(not_adm)?;
    let d = col.dp(lambda_prime, ell).ok_or_else(not_adm)?;
    Ok(m.pc() * d - p / m.pc() * hr)
}

fn newton(regime: Regime, ell: u8, mut p: f64, mut lp: f64, params: &ModelParams, bx: &SearchBox) -> Option<(f64, f64)> {
    for _ in 0..60 {
        let (f, g) = system(regime, ell, p, lp, params)?;
        let scale = 1.0 + lp.abs();
        if f.abs() <= 1e-13 * scale && g.abs() <= 1e-11 * scale {
            return Some((p, lp));
        }
        let dp = 1e-5 * derivative_step(regime, p).max(1e-9) / 1e-3;
        let dl = 1e-6 * lp.max(1.0);
        let (fp, gp) = system(regime, ell, p + dp, lp, params)?;
        let (fm, gm) = system(regime, ell, p - dp, lp, params)?;
        let (fl, gl) = system(regime, ell, p, lp + dl, params)?;
        let (fr, gr) = system(regime, ell, p, lp - dl, params)?;
        let j11 = (fp - fm) / (2.0 * dp);
        let j12 = (fl - fr) / (2.0 * dl);
        let j21 = (gp - gm) / (2.0 * dp);
        let j22 = (gl - gr) / (2.0 * dl);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let mut sp = -(j22 * f - j12 * g) / det;
        let mut sl = -(-j21 * f + j11 * g) / det;
        // Damp steps that would leave the admissible region.
        let limit = 0.05 * (bx.p_max - bx.p_min);
        let norm = (sp / limit).abs().max((sl / (0.1 * lp.max(0.1))).abs());
        if norm > 1.0 {
            sp /= norm;
            sl /= norm;
        }
        p += sp;
        lp += sl;
        if p <= bx.p_min * 0.999 || p >= 1.0 || lp <= 0.0 || lp > 2.0 * bx.lambda_prime_max {
            return None;
        }
        if sp.abs() <= 1e-15 && sl.abs() <= 1e-15 * lp {
            return Some((p, lp));
        }
    }
    None
}

/// Saddle-node points of one `ell`-branch inside `search_box`.
///
/// Grid cells where both `H` and `dH/dp` change sign seed two-dimensional Newton iterations with
/// a finite-difference Jacobian. Converged points must satisfy `|H|, |dH/dp| <= 1e-10`; seeds
/// whose iteration diverges are discarded. Points closer than `1e-6` are merged. The index `n`
/// counts points in order of decreasing `eta`.
pub fn find_bifurcations(
    regime: Regime,
    ell: u8,
    params: &ModelParams,
    search_box: &SearchBox,
) -> Result<Vec<BifurcationPoint>> {
    params.validate()?;
    super::effective::ell_sign(ell)?;
    search_box.validate()?;
    let bx = search_box;
    let ps: Vec<f64> =
        (0..bx.n_p).map(|i| bx.p_min + (bx.p_max - bx.p_min) * i as f64 / (bx.n_p - 1) as f64).collect();
    let ls: Vec<f64> = (0..bx.n_lambda_prime)
        .map(|j| {
            bx.lambda_prime_min
                + (bx.lambda_prime_max - bx.lambda_prime_min) * j as f64 / (bx.n_lambda_prime - 1) as f64
        })
        .collect();
    let table: Vec<Vec<Option<(f64, f64)>>> = ps
        .par_iter()
        .map(|&p| {
            let col = Column::new(regime, p, params);
            ls.iter().map(|&lp| Some((col.value(lp, ell)?, col.dp(lp, ell)?))).collect()
        })
        .collect();
    let mut seeds = Vec::new();
    for i in 0..bx.n_p - 1 {
        for j in 0..bx.n_lambda_prime - 1 {
            let c: Vec<(f64, f64)> = [table[i][j], table[i + 1][j], table[i][j + 1], table[i + 1][j + 1]]
                .into_iter()
                .flatten()
                .collect();
            if c.len() < 2 {
                continue;
            }
            let changes = |k: usize| {
                let pos = c.iter().any(|v| if k == 0 { v.0 > 0.0 } else { v.1 > 0.0 });
                let neg = c.iter().any(|v| if k == 0 { v.0 < 0.0 } else { v.1 < 0.0 });
                pos && neg
            };
            if changes(0) && changes(1) {
                seeds.push((0.5 * (ps[i] + ps[i + 1]), 0.5 * (ls[j] + ls[j + 1])));
            }
        }
    }
    // Roots of H along each column with the interpolated dH/dp; a sign change of dH/dp between
    // matching roots of neighbouring columns marks a tangency.
    let column_roots: Vec<Vec<(f64, f64)>> = table
        .iter()
        .map(|col| {
            let mut out = Vec::new();
            for j in 0..bx.n_lambda_prime - 1 {
                if let (Some((f0, d0)), Some((f1, d1))) = (col[j], col[j + 1]) {
                    if (f0 < 0.0) != (f1 < 0.0) {
                        let t = f0 / (f0 - f1);
                        out.push((ls[j] + t * (ls[j + 1] - ls[j]), d0 + t * (d1 - d0)));
                    }
                }
            }
            out
        })
        .collect();
    let dl = (bx.lambda_prime_max - bx.lambda_prime_min) / (bx.n_lambda_prime - 1) as f64;
    for i in 0..bx.n_p - 1 {
        for &(l0, d0) in &column_roots[i] {
            for &(l1, d1) in &column_roots[i + 1] {
                if (l1 - l0).abs() <= 4.0 * dl && (d0 < 0.0) != (d1 < 0.0) {
                    seeds.push((0.5 * (ps[i] + ps[i + 1]), 0.5 * (l0 + l1)));
                }
            }
        }
    }
    let found: Vec<(f64, f64)> = seeds.par_iter().filter_map(|&(p, lp)| newton(regime, ell, p, lp, params, bx)).collect();
    let mut unique: Vec<(f64, f64)> = Vec::new();
    for (p, lp) in found {
        if p < bx.p_min || p > bx.p_max || lp < bx.lambda_prime_min || lp > bx.lambda_prime_max {
            continue;
        }
        if unique.iter().all(|&(q, l)| ((q - p).powi(2) + (l - lp).powi(2)).sqrt() > 1e-6) {
            unique.push((p, lp));
        }
    }
    let mut points = Vec::new();
    for (p, lp) in unique {
        let m = EllipticModulus::new(p)?;
        let eq = EffectiveEquation::new(regime, m, params)?;
        let h = match eq.value(lp, ell)? {
            Some(h) => h,
            None => continue,
        };
        let hp = h_p_derivative(regime, ell, m, lp, params)?;
        if h.abs() > 1e-10 || hp.abs() > 1e-10 {
            continue;
        }
        let state = match reconstruct(regime, ell, m, lp, params) {
            Ok(s) => s,
            Err(Error::Pole(_)) | Err(Error::Divergent(_)) => continue,
            Err(e) => return Err(e),
        };
        points.push(BifurcationPoint {
            n: 0,
            regime,
            ell,
            eta_n: state.eta,
            omega_n: state.omega,
            p: m,
            lambda_prime: lp,
            residual_h: h.abs(),
            residual_hp: hp.abs(),
            state,
        });
    }
    number_points(&mut points);
    Ok(points)
}

fn number_points(points: &mut [BifurcationPoint]) {
    points.sort_by(|x, y| y.eta_n.total_cmp(&x.eta_n));
    for (i, b) in points.iter_mut().enumerate() {
        b.n = i + 1;
    }
}

/// Saddle-node points of both `ell`-branches, numbered together by decreasing `eta`.
pub fn find_all_bifurcations(regime: Regime, params: &ModelParams, search_box: &SearchBox) -> Result<Vec<BifurcationPoint>> {
    let mut all = find_bifurcations(regime, 1, params, search_box)?;
    all.extend(find_bifurcations(regime, 2, params, search_box)?);
    number_points(&mut all);
    Ok(all)
}

/// Number of `p`-roots of `H(., lambda')` in `[p - width, p + width]` at `lambda' - delta` and
/// `lambda' + delta`; a saddle-node point shows a change by two.
pub fn fold_root_counts(point: &BifurcationPoint, params: &ModelParams, delta: f64, width: f64) -> Result<(usize, usize)> {
    let count = |lp: f64| -> usize {
        let n = 400;
        let p0 = point.p.p();
        let lo = (p0 - width).max(match point.regime {
            Regime::Focusing => FRAC_1_SQRT_2 + 1e-9,
            Regime::Defocusing => 0.0,
        });
        let hi = (p0 + width).min(1.0 - 1e-12);
        let mut prev: Option<f64> = None;
        let mut roots = 0;
        for i in 0..=n {
            let p = lo + (hi - lo) * i as f64 / n as f64;
            let v = EllipticModulus::new(p)
                .ok()
                .filter(|m| two_p2_minus_one(*m) > 0.0 || point.regime == Regime::Defocusing)
                .and_then(|m| EffectiveEquation::new(point.regime, m, params).ok())
                .and_then(|e| e.reduced(lp, point.ell).ok().flatten());
            if let (Some(a), Some(b)) = (prev, v) {
                if (a < 0.0) != (b < 0.0) {
                    roots += 1;
                }
            }
            prev = v;
        }
        roots
    };
    Ok((count(point.lambda_prime - delta), count(point.lambda_prime + delta)))
}
