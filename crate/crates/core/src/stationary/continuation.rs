use super::effective::{EffectiveEquation, Regime};
use super::solve::bracketed_root;
use super::state::{reconstruct, StationaryState};
use crate::error::{Error, Result};
use crate::linear::ModelParams;
use crate::specfun::EllipticModulus;

/// A point of a solution curve in the coordinates `(theta, lambda', tau)`, where
/// `theta = -ln(pc)` and `tau` is `tanh` (focusing) or `coth` (defocusing) of the tail phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveCoords {
    pub theta: f64,
    pub lambda_prime: f64,
    pub tau: f64,
}

impl CurveCoords {
    fn to_array(self) -> [f64; 3] {
        [self.theta, self.lambda_prime, self.tau]
    }

    fn from_array(x: [f64; 3]) -> Self {
        Self { theta: x[0], lambda_prime: x[1], tau: x[2] }
    }

    pub fn modulus(&self) -> Result<EllipticModulus> {
        EllipticModulus::from_complement((-self.theta).exp())
    }

    /// `1` when `tau < 0`, `2` otherwise.
    pub fn ell(&self) -> u8 {
        if self.tau < 0.0 {
            1
        } else {
            2
        }
    }
}

/// A traced curve point with its reconstructed state.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub coords: CurveCoords,
    pub state: StationaryState,
}

/// Settings of the pseudo-arclength continuation.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub max_points: usize,
    /// Tracing stops beyond this `theta` (that is, below `pc = exp(-theta_max)`).
    pub theta_max: f64,
    /// Tracing stops above this `lambda'`.
    pub lambda_prime_max: f64,
    /// Tracing stops once `|eta|` exceeds this value.
    pub eta_abs_max: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.01,
            min_step: 1e-7,
            max_step: 0.05,
            max_points: 20_000,
            theta_max: 34.5,
            lambda_prime_max: 60.0,
            eta_abs_max: 300.0,
        }
    }
}

/// The smooth effective system `(F1 / scale, F2)` of a regime as a map of `R^3 -> R^2`.
pub(crate) struct CurveSystem {
    pub regime: Regime,
    pub params: ModelParams,
}

impl CurveSystem {
    fn theta_min(&self) -> f64 {
        match self.regime {
            // 2p^2 - 1 = 1 - 2 pc^2 must stay positive.
            Regime::Focusing => -(0.5f64 * (1.0 - 1e-6)).sqrt().ln(),
            Regime::Defocusing => 0.0,
        }
    }

    pub fn eval(&self, x: [f64; 3]) -> Option<[f64; 2]> {
        if !(x[0] > self.theta_min()) || !(x[1] > 0.0) || !x.iter().all(|v| v.is_finite()) {
            return None;
        }
        let m = EllipticModulus::from_complement((-x[0]).exp()).ok()?;
        let eq = EffectiveEquation::new(self.regime, m, &self.params).ok()?;
        let s = eq.sample(x[1]);
        let (f1, f2) = eq.smooth_system(x[1], x[2]);
        let sd = (s.sn / s.dn).abs();
        let scale = match self.regime {
            Regime::Focusing => 1.0 + sd * (x[1] + self.params.alpha.abs()) + x[1] * eq.factor() * (s.cn / (s.dn * s.dn)).abs(),
            Regime::Defocusing => 1.0 + sd * (x[1] + self.params.alpha.abs()) + x[1] * eq.factor() / s.cn.abs(),
        };
        let out = [f1 / scale, f2];
        if out.iter().all(|v| v.is_finite()) {
            Some(out)
        } else {
            None
        }
    }

    fn jacobian(&self, x: [f64; 3]) -> Option<[[f64; 3]; 2]> {
        let mut j = [[0.0; 3]; 2];
        for k in 0..3 {
            let h = 1e-7 * x[k].abs().max(1.0);
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let fp = self.eval(xp)?;
            let fm = self.eval(xm)?;
            for r in 0..2 {
                j[r][k] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        Some(j)
    }

    fn tangent(&self, x: [f64; 3]) -> Option<[f64; 3]> {
        let j = self.jacobian(x)?;
        let t = cross(j[0], j[1]);
        let n = norm(t);
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(scale(t, 1.0 / n))
    }

    /// Newton projection of `x` onto the curve within the hyperplane `dir . (y - x) = 0`.
    pub fn correct(&self, x: [f64; 3], dir: [f64; 3]) -> Option<[f64; 3]> {
        let base = x;
        let mut y = x;
        for _ in 0..12 {
            let f = self.eval(y)?;
            let j = self.jacobian(y)?;
            let g = dot(dir, sub(y, base));
            let rhs = [-f[0], -f[1], -g];
            let m = [j[0], j[1], dir];
            let d = solve3(m, rhs)?;
            y = add(y, d);
            if norm(d) <= 1e-13 * (1.0 + norm(y)) {
                let f = self.eval(y)?;
                if f[0].abs() <= 1e-11 && f[1].abs() <= 1e-11 {
                    return Some(y);
                }
                return None;
            }
        }
        let f = self.eval(y)?;
        if f[0].abs() <= 1e-11 && f[1].abs() <= 1e-11 {
            Some(y)
        } else {
            None
        }
    }
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}
fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}
fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = dot(m[0], cross(m[1], m[2]));
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let c0 = cross(m[1], m[2]);
    let c1 = cross(m[2], m[0]);
    let c2 = cross(m[0], m[1]);
    // Columns of the inverse are the cross products divided by det.
    Some([
        (c0[0] * r[0] + c1[0] * r[1] + c2[0] * r[2]) / det,
        (c0[1] * r[0] + c1[1] * r[1] + c2[1] * r[2]) / det,
        (c0[2] * r[0] + c1[2] * r[1] + c2[2] * r[2]) / det,
    ])
}

fn make_point(sys: &CurveSystem, x: [f64; 3]) -> Option<CurvePoint> {
    let c = CurveCoords::from_array(x);
    let m = c.modulus().ok()?;
    let state = reconstruct(sys.regime, c.ell(), m, c.lambda_prime, &sys.params).ok()?;
    Some(CurvePoint { coords: c, state })
}

/// Traces the solution curve through `start` in the direction `sign * tangent`.
fn trace_direction(sys: &CurveSystem, start: [f64; 3], sign: f64, opts: &TraceOptions) -> Vec<CurvePoint> {
    let mut out = Vec::new();
    let mut x = start;
    let mut t = match sys.tangent(x) {
        Some(t) => scale(t, sign),
        None => return out,
    };
    let mut h = opts.initial_step;
    while out.len() < opts.max_points {
        let pred = add(x, scale(t, h));
        let next = sys.correct(pred, t).and_then(|y| {
            let tn = sys.tangent(y)?;
            let tn = if dot(tn, t) < 0.0 { scale(tn, -1.0) } else { tn };
            let dist = norm(sub(y, x));
            if dot(tn, t) < 0.95 || dist > 2.0 * h || dist < 0.25 * h {
                None
            } else {
                Some((y, tn))
            }
        });
        match next {
            Some((y, tn)) => {
                if y[0] > opts.theta_max || y[1] > opts.lambda_prime_max || y[2].abs() > 1.0 {
                    break;
                }
                let point = match make_point(sys, y) {
                    Some(p) => p,
                    None => break,
                };
                let stop = point.state.eta.abs() > opts.eta_abs_max;
                out.push(point);
                if stop {
                    break;
                }
                x = y;
                t = tn;
                h = (h * 1.3).min(opts.max_step);
            }
            None => {
                h *= 0.5;
                if h < opts.min_step {
                    break;
                }
            }
        }
    }
    out
}

/// Traces the whole curve through the root `start` (both directions), ordered along the curve.
pub fn trace_curve(regime: Regime, params: &ModelParams, start: CurveCoords, opts: &TraceOptions) -> Result<Vec<CurvePoint>> {
    let sys = CurveSystem { regime, params: *params };
    let x0 = start.to_array();
    let t0 = sys.tangent(x0).ok_or_else(|| Error::Numerical("no tangent at the continuation seed".into()))?;
    let x0 = sys.correct(x0, t0).ok_or_else(|| Error::NoConvergence("continuation seed is not on a solution curve".into()))?;
    let first = make_point(&sys, x0).ok_or_else(|| Error::Numerical("continuation seed cannot be reconstructed".into()))?;
    let mut back = trace_direction(&sys, x0, -1.0, opts);
    back.reverse();
    back.push(first);
    back.extend(trace_direction(&sys, x0, 1.0, opts));
    Ok(back)
}

/// Coordinates of a state.
pub fn coords_of(state: &StationaryState) -> CurveCoords {
    CurveCoords { theta: -state.p.pc().ln(), lambda_prime: state.lambda_prime, tau: state.tail_phase.tanh() }
}

/// Distance from `x` to the polyline through `curve`.
pub(crate) fn distance_to_curve(curve: &[CurvePoint], x: CurveCoords) -> f64 {
    let p = x.to_array();
    let mut best = f64::INFINITY;
    for w in curve.windows(2) {
        let a = w[0].coords.to_array();
        let b = w[1].coords.to_array();
        let ab = sub(b, a);
        let len2 = dot(ab, ab);
        let s = if len2 > 0.0 { (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
        best = best.min(norm(sub(p, add(a, scale(ab, s)))));
    }
    if curve.len() == 1 {
        best = norm(sub(p, curve[0].coords.to_array()));
    }
    best
}

/// The state between two neighbouring curve points whose `eta` equals `target`.
pub(crate) fn state_at_eta(
    regime: Regime,
    params: &ModelParams,
    a: &CurvePoint,
    b: &CurvePoint,
    target: f64,
) -> Option<StationaryState> {
    let sys = CurveSystem { regime, params: *params };
    let xa = a.coords.to_array();
    let xb = b.coords.to_array();
    let chord = sub(xb, xa);
    let dir = scale(chord, 1.0 / norm(chord));
    let at = |s: f64| -> Option<StationaryState> {
        let y = sys.correct(add(xa, scale(chord, s)), dir)?;
        make_point(&sys, y).map(|p| p.state)
    };
    if a.state.eta == target {
        return Some(a.state.clone());
    }
    if b.state.eta == target {
        return Some(b.state.clone());
    }
    let g = |s: f64| at(s).map(|st| st.eta - target).unwrap_or(f64::NAN);
    let (s, _) = bracketed_root(g, 0.0, 1.0, 1e-12 * (1.0 + target.abs()))?;
    at(s)
}
