use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Report of the constant-phase test for a complex profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealReductionReport {
    /// `max |psi' conj(psi) - psi conj(psi')|` over the grid (centred differences).
    pub max_wronskian: f64,
    /// Global phase `theta` with `psi ~ e^{i theta} * real`, in `(-pi/2, pi/2]`.
    pub phase: f64,
    /// `max |Im(e^{-i theta} psi)| / max |psi|`.
    pub residual_imag: f64,
}

/// Tests whether a grid profile is a real function up to a constant phase.
///
/// The phase is the half-argument of `sum psi_j^2` (the weighted average of `2 arg psi`), which
/// is exact for `e^{i theta} * real` and insensitive to sign changes of the real factor.
pub fn check_real_reduction(psi: &[Complex64], dx: f64) -> RealReductionReport {
    let n = psi.len();
    let mut w_max: f64 = 0.0;
    for j in 1..n.saturating_sub(1) {
        let d = (psi[j + 1] - psi[j - 1]) / (2.0 * dx);
        let w = d * psi[j].conj() - psi[j] * d.conj();
        w_max = w_max.max(w.norm());
    }
    let s: Complex64 = psi.iter().map(|z| z * z).sum();
    let mut phase = if s.norm() == 0.0 { 0.0 } else { 0.5 * s.arg() };
    if phase <= -std::f64::consts::FRAC_PI_2 {
        phase += std::f64::consts::PI;
    }
    let rot = Complex64::from_polar(1.0, -phase);
    let sup = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let imag = psi.iter().map(|z| (z * rot).im.abs()).fold(0.0, f64::max);
    RealReductionReport { max_wronskian: w_max, phase, residual_imag: if sup == 0.0 { 0.0 } else { imag / sup } }
}
