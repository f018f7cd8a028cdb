use crate::error::{Error, Result};
use std::f64::consts::E;

const BRANCH_POINT: f64 = -1.0 / E;
const BRANCH_SLACK: f64 = 4.0 * f64::EPSILON;

/// Principal branch `W0` of the Lambert W function, defined for `x >= -1/e`.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < BRANCH_POINT - BRANCH_SLACK {
        return Err(Error::Domain(format!("lambert_w0 requires x >= -1/e, got {x}")));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let t = E * x + 1.0;
    if t <= 0.0 {
        return Ok(-1.0);
    }
    let w0 = if t < 0.3 {
        let s = (2.0 * t).sqrt();
        -1.0 + s - s * s / 3.0 + 11.0 / 72.0 * s * s * s
    } else if x.abs() < 0.5 {
        x * (1.0 - x + 1.5 * x * x)
    } else if x < 3.0 {
        0.5 * (1.0 + x).ln() + 0.3 * x.ln_1p().min(1.0)
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    halley(x, w0)
}

/// Lower branch `W-1` of the Lambert W function, defined for `-1/e <= x < 0`.
pub fn lambert_wm1(x: f64) -> Result<f64> {
    if x.is_nan() || !(BRANCH_POINT - BRANCH_SLACK..0.0).contains(&x) {
        return Err(Error::Domain(format!("lambert_wm1 requires -1/e <= x < 0, got {x}")));
    }
    let t = E * x + 1.0;
    if t <= 0.0 {
        return Ok(-1.0);
    }
    let w0 = if t < 0.3 {
        let s = -(2.0 * t).sqrt();
        -1.0 + s - s * s / 3.0 + 11.0 / 72.0 * s * s * s
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    halley(x, w0)
}

fn halley(x: f64, mut w: f64) -> Result<f64> {
    for _ in 0..60 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            return Ok(w);
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            return Ok(w);
        }
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    // Near the branch point the iteration can bounce at rounding level; accept it if the
    // residual is at that level.
    if (w * w.exp() - x).abs() <= 1e-13 * x.abs().max(f64::MIN_POSITIVE) {
        return Ok(w);
    }
    Err(Error::NoConvergence(format!("Lambert W iteration at x = {x}")))
}
