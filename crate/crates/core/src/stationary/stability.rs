use super::state::StationaryState;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Label attached to every slope classification.
pub const SLOPE_CAVEAT: &str = "conjectural: assumes the spectral assumptions of the slope criterion";

/// Sign of `d mu^2 / d omega` with `omega = -Omega`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlopeClass {
    Stable,
    Unstable,
    Marginal,
}

impl SlopeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SlopeClass::Stable => "stable",
            SlopeClass::Unstable => "unstable",
            SlopeClass::Marginal => "marginal",
        }
    }
}

/// Slope of the norm along a branch at one state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeEntry {
    /// Position of the state in the input slice.
    pub index: usize,
    pub omega: f64,
    pub mu_sq: f64,
    pub slope: f64,
    pub classification: SlopeClass,
    pub caveat: String,
}

/// A point `(omega, mu^2)` of a branch.
pub trait BranchSample {
    fn omega_freq(&self) -> f64;
    fn norm_sq(&self) -> f64;
}

impl BranchSample for StationaryState {
    fn omega_freq(&self) -> f64 {
        -self.omega
    }
    fn norm_sq(&self) -> f64 {
        self.mu_sq
    }
}

impl BranchSample for (f64, f64) {
    fn omega_freq(&self) -> f64 {
        self.0
    }
    fn norm_sq(&self) -> f64 {
        self.1
    }
}

/// `d mu^2 / d omega` at every interior point (returned in increasing `omega`) of a branch, by centred (non-uniform) differences
/// after sorting by `omega = -Omega`; classified as stable (`> tol`), unstable (`< -tol`) or
/// marginal.
pub fn stability_slope<S: BranchSample>(branch: &[S], tol: f64) -> Result<Vec<SlopeEntry>> {
    if branch.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "slope needs at least 3 states along the branch, got {}",
            branch.len()
        )));
    }
    let mut pts: Vec<(f64, f64, usize)> =
        branch.iter().enumerate().map(|(i, s)| (s.omega_freq(), s.norm_sq(), i)).collect();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out = Vec::with_capacity(pts.len() - 2);
    for i in 1..pts.len() - 1 {
        let (w0, m0, _) = pts[i - 1];
        let (w1, m1, index) = pts[i];
        let (w2, m2, _) = pts[i + 1];
        let (h0, h1) = (w1 - w0, w2 - w1);
        if h0 <= 0.0 || h1 <= 0.0 {
            return Err(Error::InvalidParameter(format!("repeated omega = {w1} along the branch")));
        }
        // Second-order derivative on a non-uniform stencil.
        let slope = -h1 / (h0 * (h0 + h1)) * m0 + (h1 - h0) / (h0 * h1) * m1 + h0 / (h1 * (h0 + h1)) * m2;
        let classification = if slope > tol {
            SlopeClass::Stable
        } else if slope < -tol {
            SlopeClass::Unstable
        } else {
            SlopeClass::Marginal
        };
        out.push(SlopeEntry { index, omega: w1, mu_sq: m1, slope, classification, caveat: SLOPE_CAVEAT.to_string() });
    }
    Ok(out)
}
