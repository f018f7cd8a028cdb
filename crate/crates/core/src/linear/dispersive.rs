use super::kernel::{calg, principal_value_j, w_factor};
use super::params::ModelParams;
use super::spectrum::bound_state;
use crate::dynamics::{CrankNicolson, WaveField};
use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `I_a(z) = int e^{-ik^2 t + ikz} (1 - cos 2ka) / (ik) dk` in closed form,
/// `I_a(z) = J(z) - J(z + 2a)/2 - J(z - 2a)/2` with `J(c) = sqrt(pi/(it)) int_0^c e^{iv^2/4t} dv`
/// expressed through Fresnel integrals.
pub fn ia_closed_form(z: f64, t: f64, a: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("I_a needs t > 0, got {t}")));
    }
    if a == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(principal_value_j(z, t) - 0.5 * principal_value_j(z + 2.0 * a, t) - 0.5 * principal_value_j(z - 2.0 * a, t))
}

/// Result of scanning `|I_a(z)| sqrt(t)` over a sample box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    /// Largest sampled `|I_a(z)| sqrt(t)`.
    pub max_scaled: f64,
    /// Where the maximum occurs.
    pub z_at_max: f64,
    pub t_at_max: f64,
    /// The quoted bound `a / (4 sqrt(pi))`.
    pub bound: f64,
    /// Whether `max_scaled <= bound (1 + 1e-6)`.
    pub holds: bool,
    pub samples: usize,
}

/// Samples `|I_a(z)| sqrt(t)` on the grid `zs x ts` and compares with `a / (4 sqrt(pi))`.
pub fn lemma1_bound_check(a: f64, zs: &[f64], ts: &[f64]) -> Result<Lemma1Report> {
    let bound = a / (4.0 * PI.sqrt());
    let mut best = (0.0, 0.0, 0.0);
    for &t in ts {
        for &z in zs {
            let v = ia_closed_form(z, t, a)?.norm() * t.sqrt();
            if v > best.0 {
                best = (v, z, t);
            }
        }
    }
    Ok(Lemma1Report {
        max_scaled: best.0,
        z_at_max: best.1,
        t_at_max: best.2,
        bound,
        holds: best.0 <= bound * (1.0 + 1e-6),
        samples: zs.len() * ts.len(),
    })
}

/// `Q(k) = (1 - cos 2ka)/(ik) * (alpha w / 2i) / (1 + alpha w / 2i)` with `w = (e^{2ika} - 1)/k`.
pub fn lemma2_q(k: f64, params: &ModelParams) -> Complex64 {
    let a = params.a;
    let ka = k * a;
    let sinc = if ka.abs() < 1e-4 { 1.0 - ka * ka / 6.0 } else { ka.sin() / ka };
    // (1 - cos 2ka)/(ik) = -2i a sin(ka) sinc(ka)
    let first = Complex64::new(0.0, -2.0 * a * ka.sin() * sinc);
    let r = params.alpha * w_factor(k, a) / (2.0 * I);
    first * r / (1.0 + r)
}

/// Report of the `Q(k)` estimates on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Report {
    /// Number of grid points with `|Q(k)| > min(|alpha| a^2, |alpha| / k^2)`.
    pub violations: usize,
    /// Largest ratio `|Q(k)| / min(|alpha| a^2, |alpha| / k^2)`.
    pub max_ratio: f64,
    pub k_at_max_ratio: f64,
    /// Largest finite-difference `|Q'(k)|`.
    pub max_q_prime: f64,
    /// Largest `k^2 |Q'(k)|` over `|k| >= pi / a`.
    pub max_k2_q_prime: f64,
    /// Largest finite-difference `|Q''(k)|`.
    pub max_q_second: f64,
    /// `Q(k) / k` at a small `k`, to compare with the predicted slope.
    pub small_k_slope: Complex64,
    /// Predicted slope `-2i a^3 alpha / (1 + a alpha)` (absent at the threshold).
    pub predicted_slope: Option<Complex64>,
    /// `Q(k)` at a small `k`.
    pub small_k_value: Complex64,
}

/// Evaluates `Q` on `k_grid`, counts violations of `|Q| <= min(|alpha| a^2, |alpha|/k^2)` and
/// estimates `Q'`, `Q''` by central differences.
pub fn lemma2_bounds_check(params: &ModelParams, k_grid: &[f64]) -> Lemma2Report {
    let a = params.a;
    let al = params.alpha.abs();
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    let mut k_at = 0.0;
    let (mut qp, mut k2qp, mut qpp): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let h = 1e-4;
    for &k in k_grid {
        if k == 0.0 {
            continue;
        }
        let q = lemma2_q(k, params).norm();
        let bound = (al * a * a).min(al / (k * k));
        let ratio = q / bound;
        if ratio > max_ratio {
            max_ratio = ratio;
            k_at = k;
        }
        if q > bound * (1.0 + 1e-12) {
            violations += 1;
        }
        let qm = lemma2_q(k - h, params);
        let q0 = lemma2_q(k, params);
        let qpl = lemma2_q(k + h, params);
        let d1 = ((qpl - qm) / (2.0 * h)).norm();
        let d2 = ((qpl - 2.0 * q0 + qm) / (h * h)).norm();
        qp = qp.max(d1);
        qpp = qpp.max(d2);
        if k.abs() >= PI / a {
            k2qp = k2qp.max(k * k * d1);
        }
    }
    let ks = 1e-6 / a;
    let small = lemma2_q(ks, params);
    let predicted = if params.is_threshold() {
        None
    } else {
        Some(Complex64::new(0.0, -2.0 * a.powi(3) * params.alpha / (1.0 + a * params.alpha)))
    };
    Lemma2Report {
        violations,
        max_ratio,
        k_at_max_ratio: k_at,
        max_q_prime: qp,
        max_k2_q_prime: k2qp,
        max_q_second: qpp,
        small_k_slope: small / ks,
        predicted_slope: predicted,
        small_k_value: small,
    }
}

/// Normalised Gaussian `exp(-(x - center)^2 / (2 width^2))` on the grid (unit discrete norm).
pub fn gaussian_field(params: &ModelParams, l: f64, dx: f64, center: f64, width: f64) -> Result<WaveField> {
    if !(width > 0.0) {
        return Err(Error::InvalidParameter(format!("Gaussian width must be positive, got {width}")));
    }
    let mut w = WaveField::from_real_fn(params, l, dx, |x| (-(x - center).powi(2) / (2.0 * width * width)).exp())?;
    w.normalize()?;
    Ok(w)
}

/// The eigenfunction sampled on the grid of `like`, normalised in the discrete norm, or `None`.
pub fn eigenstate_field(params: &ModelParams, like: &WaveField) -> Result<Option<WaveField>> {
    let spec = bound_state(params);
    if !spec.has_bound_state() {
        return Ok(None);
    }
    let mut w = WaveField::from_real_fn(params, like.l, like.dx, |x| spec.eigenfunction(x))?;
    w.normalize()?;
    Ok(Some(w))
}

/// Removes the bound-state component: `P_c psi = psi - <psi_E, psi> psi_E`.
pub fn project_continuum(psi: &WaveField, params: &ModelParams) -> Result<WaveField> {
    let mut out = psi.clone();
    if let Some(e) = eigenstate_field(params, psi)? {
        let c = e.inner(psi);
        for (v, ev) in out.values.iter_mut().zip(&e.values) {
            *v -= c * ev;
        }
    }
    Ok(out)
}

/// How `propagate_continuum` evaluates `e^{-itH}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Backend {
    /// Crank-Nicolson integration of the linear equation with step `dt`.
    Pde { dt: f64 },
    /// Spectral representation through the evolution kernel with the y-integral done first.
    Kernel,
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Pde { dt: 0.01 }
    }
}

/// `e^{-itH} P_c psi0` on the grid of `psi0`.
pub fn propagate_continuum(psi0: &WaveField, t: f64, params: &ModelParams, backend: Backend) -> Result<WaveField> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("propagation time must be positive, got {t}")));
    }
    psi0.validate()?;
    let phi = project_continuum(psi0, params)?;
    match backend {
        Backend::Pde { dt } => crate::dynamics::evolve_linear(&phi, params, t, dt),
        Backend::Kernel => {
            let xs: Vec<f64> = (0..phi.len()).map(|j| phi.x(j)).collect();
            let vals = kernel_propagate_at(&phi, t, params, &xs)?;
            let mut out = phi.clone();
            let n = out.len();
            for (j, v) in vals.into_iter().enumerate() {
                out.values[j] = if j == 0 || j == n - 1 { Complex64::new(0.0, 0.0) } else { v };
            }
            Ok(out)
        }
    }
}

/// `e^{-itH} phi` at the points `xs` through the kernel, for `phi` already in the continuous
/// subspace. Exchanging the order of integration gives
/// `(1/2pi) int dk e^{-ik^2 t} [e^{ikx}(f1(-k) - f1(k)) - (alpha/G)(-e^{ik(x+2a)} f1 + e^{ik(|x-a|+a)} f1
///  + e^{ik(x+a)} f2 - e^{ik|x-a|} f2)]` with `f1(k) = int e^{iky} phi` and `f2(k) = int e^{ik|y-a|} phi`.
pub fn kernel_propagate_at(phi: &WaveField, t: f64, params: &ModelParams, xs: &[f64]) -> Result<Vec<Complex64>> {
    if params.is_threshold() {
        return Err(Error::ThresholdResonance);
    }
    let a = params.a;
    let alpha = params.alpha;
    let ys: Vec<(f64, Complex64)> = (0..phi.len()).map(|j| (phi.x(j), phi.values[j] * phi.dx)).collect();
    let l1: f64 = ys.iter().map(|(_, v)| v.norm()).sum();
    let transforms = |k: f64| -> (Complex64, Complex64, Complex64) {
        let mut f1p = Complex64::new(0.0, 0.0);
        let mut below = Complex64::new(0.0, 0.0);
        let mut above = Complex64::new(0.0, 0.0);
        let step = Complex64::new(0.0, k * phi.dx).exp();
        let mut e = Complex64::new(0.0, 0.0);
        let mut f1m = Complex64::new(0.0, 0.0);
        for (i, &(y, v)) in ys.iter().enumerate() {
            e = if i % 256 == 0 { Complex64::new(0.0, k * y).exp() } else { e * step };
            f1p += e * v;
            f1m += e.conj() * v;
            if y >= a {
                above += e * v;
            } else {
                below += e.conj() * v;
            }
        }
        let ea = Complex64::new(0.0, k * a).exp();
        (f1p, f1m, above * ea.conj() + below * ea)
    };
    // Spectral cut-off: the transforms decay once k exceeds the inverse length scale of phi.
    let k_nyquist = PI / (2.0 * phi.dx);
    let mut k_max = 1.0;
    loop {
        let window = [k_max, 1.1 * k_max, 1.2 * k_max, 1.35 * k_max];
        let small = window.iter().all(|&k| {
            let (p, m, f) = transforms(k);
            p.norm() + m.norm() + f.norm() < 1e-10 * l1.max(1e-300)
        });
        if small || k_max >= k_nyquist {
            break;
        }
        k_max *= 1.25;
    }
    let x_max = xs.iter().copied().fold(0.0, f64::max);
    // Panels short enough that the total phase changes by at most pi on each.
    let rule = GaussLegendre::new(16);
    let mut nodes = Vec::new();
    let mut k = 0.0;
    while k < k_max {
        let dk = (PI / (2.0 * k * t.abs() + x_max + 3.0 * a + 1.0)).min(k_max - k);
        for (kn, w) in rule.panel(k, k + dk) {
            nodes.push((kn, w));
            nodes.push((-kn, w));
        }
        k += dk;
    }
    let pre: Vec<(f64, f64, Complex64, Complex64, Complex64, Complex64)> = nodes
        .par_iter()
        .map(|&(k, w)| {
            let (f1p, f1m, f2) = transforms(k);
            let g = calg(Complex64::new(k, 0.0), params);
            (k, w, f1p, f1m, f2, alpha / g)
        })
        .collect();
    let out = xs
        .par_iter()
        .map(|&x| {
            if x <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for &(k, w, f1p, f1m, f2, ag) in &pre {
                let e = |s: f64| Complex64::new(0.0, k * s).exp();
                let xa = (x - a).abs();
                let bracket = e(x) * (f1m - f1p)
                    - ag * (-e(x + 2.0 * a) * f1p + e(xa + a) * f1p + e(x + a) * f2 - e(xa) * f2);
                acc += Complex64::new(0.0, -k * k * t).exp() * bracket * w;
            }
            acc / (2.0 * PI)
        })
        .collect();
    Ok(out)
}

/// Grid and time sampling of the dispersive-decay check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersiveOptions {
    #[serde(rename = "L")]
    pub l: f64,
    pub dx: f64,
    pub dt: f64,
    /// Observation times, sorted increasingly.
    pub times: Vec<f64>,
}

impl Default for DispersiveOptions {
    fn default() -> Self {
        let times = (0..9).map(|i| 10f64.powf(i as f64 / 4.0)).collect();
        Self { l: 1200.0, dx: 0.05, dt: 0.02, times }
    }
}

/// One row of the decay table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersiveRow {
    pub t: f64,
    pub sup_norm: f64,
    pub sqrt_t_times_sup: f64,
}

/// Result of the dispersive-decay check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersiveReport {
    pub rows: Vec<DispersiveRow>,
    /// Least-squares slope of `log(sqrt(t) sup|psi_t|)` against `log t`.
    pub loglog_slope: f64,
    /// `||P_c psi0||_{L1}`.
    pub l1_norm: f64,
    /// Empirical constant `max_t sqrt(t) sup|psi_t| / ||P_c psi0||_{L1}`.
    pub empirical_constant: f64,
    /// Largest `|psi(0.9 L)| / sup|psi|` seen; above `1e-6` the truncation may matter.
    pub reflection_ratio: f64,
    /// Set when `a alpha = -1`, where the decay statement is not covered.
    pub threshold_case: bool,
}

/// Propagates `P_c psi0` with the linear Crank-Nicolson solver and tabulates
/// `sqrt(t) ||e^{-itH} P_c psi0||_inf` at the requested times.
pub fn dispersive_check(psi0: &WaveField, params: &ModelParams, opts: &DispersiveOptions) -> Result<DispersiveReport> {
    psi0.validate()?;
    if opts.times.is_empty() || opts.times.windows(2).any(|w| w[1] <= w[0]) || opts.times[0] <= 0.0 {
        return Err(Error::InvalidParameter("observation times must be positive and increasing".into()));
    }
    let mut psi = project_continuum(psi0, params)?;
    let l1 = psi.norm_l1();
    let monitor = ((0.9 * psi.l) / psi.dx).round() as usize;
    let mut rows = Vec::with_capacity(opts.times.len());
    let mut t_now = 0.0;
    let mut scratch = Vec::new();
    let mut reflection: f64 = 0.0;
    for &t in &opts.times {
        let span = t - t_now;
        let n = ((span / opts.dt) - 1e-9).ceil().max(1.0) as usize;
        let stepper = CrankNicolson::new(&psi, params, span / n as f64);
        for _ in 0..n {
            stepper.step(&mut psi.values, &mut scratch);
        }
        t_now = t;
        let sup = psi.sup_norm();
        reflection = reflection.max(psi.values[monitor.min(psi.len() - 1)].norm() / sup);
        rows.push(DispersiveRow { t, sup_norm: sup, sqrt_t_times_sup: t.sqrt() * sup });
    }
    let slope = loglog_slope(&rows);
    let cmax = rows.iter().map(|r| r.sqrt_t_times_sup).fold(0.0, f64::max);
    Ok(DispersiveReport {
        rows,
        loglog_slope: slope,
        l1_norm: l1,
        empirical_constant: cmax / l1,
        reflection_ratio: reflection,
        threshold_case: params.is_threshold(),
    })
}

fn loglog_slope(rows: &[DispersiveRow]) -> f64 {
    let n = rows.len() as f64;
    if rows.len() < 2 {
        return 0.0;
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.t.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.sqrt_t_times_sup.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
