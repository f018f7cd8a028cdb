use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::quad::{integrate, FilonRule};
use crate::specfun::fresnel;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Secular function `G(k) = 2ik - alpha + alpha e^{2ika}`; its zeros in the upper half plane
/// are the eigenvalues `k^2`.
pub fn calg(k: Complex64, params: &ModelParams) -> Complex64 {
    2.0 * I * k - params.alpha + params.alpha * (2.0 * I * k * params.a).exp()
}

/// `w(k) = (e^{2ika} - 1)/k` for real `k`, with `w(0) = 2ia`, so that `G(k) = k (2i + alpha w(k))`.
pub fn w_factor(k: f64, a: f64) -> Complex64 {
    // e^{2ika} - 1 = -2 sin^2(ka) + i sin(2ka)
    let ka = k * a;
    Complex64::new(-2.0 * a * ka.sin() * sinc(ka), 2.0 * a * sinc(2.0 * ka))
}

/// Resolvent kernel `(H - k^2)^{-1}(x, y)` for `Im k > 0`.
pub fn resolvent_kernel(x: f64, y: f64, k: Complex64, params: &ModelParams) -> Result<Complex64> {
    if k.im <= 0.0 {
        return Err(Error::Domain(format!("resolvent needs Im k > 0, got k = {k}")));
    }
    if x < 0.0 || y < 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let a = params.a;
    let alpha = params.alpha;
    let g = calg(k, params);
    if g.norm() <= 1e-14 * (k.norm() + alpha.abs()) {
        return Err(Error::Pole(format!("G(k) vanishes at k = {k}: k^2 is an eigenvalue")));
    }
    let e = |s: f64| (I * k * s).exp();
    let k0 = I / (2.0 * k) * e((x - y).abs());
    let c = 2.0 * I * k * alpha / g;
    let k1 = 2.0 * I * k * e(x + y) * (1.0 - alpha * e(2.0 * a) / g);
    let k2 = c * e(x + (y - a).abs() + a);
    let k3 = c * e((x - a).abs() + y + a);
    let k4 = -c * e((x - a).abs() + (y - a).abs());
    Ok(k0 - (k1 + k2 + k3 + k4) / (4.0 * k * k))
}

/// Signed offsets `(s_m, c_m)` of the four exponentials in
/// `q = -e^{ik(x+y+2a)} + e^{ik(|x-a|+y+a)} + e^{ik(x+|y-a|+a)} - e^{ik(|x-a|+|y-a|)}`.
fn q_terms(x: f64, y: f64, a: f64) -> [(f64, f64); 4] {
    [
        (-1.0, x + y + 2.0 * a),
        (1.0, (x - a).abs() + y + a),
        (1.0, x + (y - a).abs() + a),
        (-1.0, (x - a).abs() + (y - a).abs()),
    ]
}

/// `q(k, x, y)` from its defining sum of four exponentials.
pub fn q_factor_exponential(k: f64, x: f64, y: f64, params: &ModelParams) -> Complex64 {
    q_terms(x, y, params.a).iter().map(|&(s, c)| s * Complex64::new(0.0, k * c).exp()).sum()
}

/// `q(k, x, y)` in the four-region form, which makes the `k^2` behaviour at `k = 0` explicit.
pub fn q_factor(k: f64, x: f64, y: f64, params: &ModelParams) -> Complex64 {
    q_over_k(k, x, y, params.a) * k
}

/// `q(k, x, y) / k`, regular at `k = 0`.
pub fn q_over_k(k: f64, x: f64, y: f64, a: f64) -> Complex64 {
    let e = |s: f64| Complex64::new(0.0, k * s).exp();
    // 1 - e^{2ika} = 2 sin^2(ka) - i sin(2ka)
    let one_minus = Complex64::new(2.0 * (k * a).sin().powi(2), -(2.0 * k * a).sin());
    match (x <= a, y <= a) {
        (true, true) => 4.0 * e(2.0 * a) * x * sinc(k * x) * (k * y).sin(),
        (true, false) => 2.0 * I * e(y) * x * sinc(k * x) * one_minus,
        (false, true) => 2.0 * I * e(x) * y * sinc(k * y) * one_minus,
        (false, false) => 4.0 * e(x + y) * a * (k * a).sin() * sinc(k * a),
    }
}

/// `J(c, t) = PV int e^{-i k^2 t + i k c} / (ik) dk = sqrt(pi/(it)) int_0^c e^{i v^2/(4t)} dv`,
/// expressed through Fresnel integrals; `J(c, -t) = conj J(c, t)`.
pub fn principal_value_j(c: f64, t: f64) -> Complex64 {
    let ta = t.abs();
    let (fc, fs) = fresnel(c / (2.0 * PI * ta).sqrt());
    let v = PI * SQRT_2 * Complex64::new(0.0, -FRAC_PI_4).exp() * Complex64::new(fc, fs);
    if t < 0.0 {
        v.conj()
    } else {
        v
    }
}

/// Tuning of the evolution-kernel quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelOptions {
    /// Target for the truncation of the k-integral at `K_cut`.
    pub tail_tol: f64,
    /// Acceptable estimated panel quadrature error.
    pub quad_tol: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self { tail_tol: 1e-8, quad_tol: 1e-8 }
    }
}

/// Value of the evolution kernel with the quadrature diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    /// Estimated error of the value (quadrature plus tail).
    pub error: f64,
    /// Truncation point of the k-integral.
    pub k_cut: f64,
}

/// Evolution kernel `U(x, y, t)` of `e^{-itH}` with default options.
pub fn evolution_kernel(x: f64, y: f64, t: f64, params: &ModelParams) -> Result<Complex64> {
    Ok(evolution_kernel_with(x, y, t, params, &KernelOptions::default())?.value)
}

/// Evolution kernel
/// `U = (4 pi i t)^{-1/2} [e^{i(x-y)^2/4t} - e^{i(x+y)^2/4t}] - (alpha / 2 pi) int e^{-ik^2 t} q / G dk`.
///
/// The correction integral is split as `q/G = q/(2ik) + R(k)`. The first part integrates in
/// closed form with Fresnel integrals; `R` decays like `1/k^2` and is integrated by
/// Gauss-Kronrod on `|k| < k0` and by Filon-Clenshaw-Curtis panels in `s = k^2` up to `K_cut`,
/// where the integration-by-parts tail estimate drops below `tail_tol`. Negative `t` gives the
/// complex conjugate kernel.
pub fn evolution_kernel_with(x: f64, y: f64, t: f64, params: &ModelParams, opts: &KernelOptions) -> Result<KernelValue> {
    params.validate()?;
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("evolution kernel needs t != 0, got {t}")));
    }
    if x < 0.0 || y < 0.0 {
        return Ok(KernelValue { value: Complex64::new(0.0, 0.0), error: 0.0, k_cut: 0.0 });
    }
    if t < 0.0 {
        let v = evolution_kernel_with(x, y, -t, params, opts)?;
        return Ok(KernelValue { value: v.value.conj(), ..v });
    }
    let free = (4.0 * PI * I * t).sqrt();
    let image = ((I * (x - y).powi(2) / (4.0 * t)).exp() - (I * (x + y).powi(2) / (4.0 * t)).exp()) / free;
    if params.alpha == 0.0 {
        return Ok(KernelValue { value: image, error: 0.0, k_cut: 0.0 });
    }
    if params.is_threshold() {
        return Err(Error::ThresholdResonance);
    }
    let a = params.a;
    let alpha = params.alpha;
    let lead: Complex64 = q_terms(x, y, a).iter().map(|&(s, c)| 0.5 * s * principal_value_j(c, t)).sum();

    // R(k) = (q/k) (-alpha w) / (2i (2i + alpha w)); R(-k) = conj R(k), so the integral over the
    // real line is 2 int_0^inf e^{-ik^2 t} Re R(k) dk.
    let re_r = |k: f64| -> f64 {
        let w = w_factor(k, a);
        let qk = q_over_k(k, x, y, a);
        (qk * (-alpha * w) / (2.0 * I * (2.0 * I + alpha * w))).re
    };
    let c_tot = x + y + 4.0 * a;
    let k0 = 2.0_f64.max(2.0 * alpha.abs());
    let low = integrate(
        |k: f64| Complex64::new(0.0, -k * k * t).exp() * (2.0 * re_r(k)),
        0.0,
        k0,
        &[],
        0.1 * opts.quad_tol,
        1e-13,
    )?;
    // Tail estimate: |R| <= 2|alpha| / (k^2 (1 - |alpha|/k)), one integration by parts against a
    // phase with derivative at least 2Kt - c_tot, both half-lines, safety factor 2.
    let tail_est = |kk: f64| {
        let denom = 2.0 * kk * t - c_tot;
        if denom <= 0.0 || kk <= alpha.abs() {
            f64::INFINITY
        } else {
            4.0 * 2.0 * alpha.abs() / (kk * kk * (1.0 - alpha.abs() / kk)) / denom
        }
    };
    let mut k_cut = (2.0 * k0).max(c_tot / t + 1.0);
    while tail_est(k_cut) > opts.tail_tol {
        k_cut *= 1.25;
        if k_cut > 1e8 {
            return Err(Error::Quadrature("evolution kernel cut-off exceeds 1e8".into()));
        }
    }
    let rule = FilonRule::new(13);
    let coarse = FilonRule::new(7);
    let mut s_lo = k0 * k0;
    let s_end = k_cut * k_cut;
    let mut high = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut vals = Vec::with_capacity(13);
    while s_lo < s_end {
        let k = s_lo.sqrt();
        let ds = (0.5 * s_lo).min(4.0 * k / c_tot).min(s_end - s_lo);
        let s_hi = s_lo + ds;
        vals.clear();
        vals.extend(rule.nodes(s_lo, s_hi).map(|s| Complex64::new(re_r(s.sqrt()) / s.sqrt(), 0.0)));
        let fine = rule.apply(&vals, s_lo, s_hi, -t);
        let sub: Vec<Complex64> = vals.iter().step_by(2).copied().collect();
        let rough = coarse.apply(&sub, s_lo, s_hi, -t);
        err += (fine - rough).norm();
        high += fine;
        s_lo = s_hi;
    }
    let total_err = (err + low.error + tail_est(k_cut)) * alpha.abs() / (2.0 * PI);
    // The panel estimate compares a 13-point with a 7-point rule and is very pessimistic.
    let value = image - alpha / (2.0 * PI) * (lead + low.value + high);
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Quadrature("non-finite evolution kernel".into()));
    }
    if err * alpha.abs() / (2.0 * PI) > 1e3 * opts.quad_tol.max(1e-12) {
        return Err(Error::Quadrature(format!("evolution kernel panel error estimate {err:e} too large")));
    }
    Ok(KernelValue { value, error: total_err, k_cut })
}
