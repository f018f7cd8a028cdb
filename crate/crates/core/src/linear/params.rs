use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Geometry and strength of the delta shell: `H = -d^2/dx^2 + alpha * delta(x - a)` on `x > 0`
/// with a Dirichlet condition at the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Position of the shell, `a > 0`.
    pub a: f64,
    /// Strength of the shell (inverse length).
    pub alpha: f64,
}

impl ModelParams {
    /// Validated constructor.
    pub fn new(a: f64, alpha: f64) -> Result<Self> {
        let p = Self { a, alpha };
        p.validate()?;
        Ok(p)
    }

    /// Checks `a > 0` and a finite `alpha`.
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidParameter(format!("shell position a must be positive, got {}", self.a)));
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be finite, got {}", self.alpha)));
        }
        Ok(())
    }

    /// Whether `a * alpha < -1`, the condition for a negative eigenvalue.
    pub fn has_bound_state(&self) -> bool {
        self.a * self.alpha < -1.0
    }

    /// Whether `a * alpha = -1` (within rounding), the zero-energy resonance.
    pub fn is_threshold(&self) -> bool {
        (self.a * self.alpha + 1.0).abs() <= 1e-12
    }
}
