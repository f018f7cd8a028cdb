//! Quadrature utilities: adaptive Gauss-Kronrod, Gauss-Legendre rules and
//! Filon-type panels for integrands with a linear oscillatory phase.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    let err = (kron - gauss).magnitude();
    (kron, err)
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Result of an adaptive quadrature: value and error estimate.
#[derive(Clone, Copy, Debug)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of `f` over `[a, b]`, split first at
/// the sorted interior `breakpoints`. Stops when the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<T: QuadValue>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate<T>> {
    let mut pts = vec![a];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    pts.extend(inner);
    pts.push(b);
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = 0.0;
    for w in pts.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(&f, w[0], w[1]);
            total = total + v;
            total_err += e;
            heap.push(Segment { a: w[0], b: w[1], value: v, err: e });
        }
    }
    let max_segments = 20_000;
    let mut count = heap.len();
    while total_err > abs_tol.max(rel_tol * total.magnitude()) {
        if count >= max_segments {
            return Err(Error::Quadrature(format!(
                "adaptive quadrature on [{a}, {b}] stalled with error {total_err:e}"
            )));
        }
        let seg = heap.pop().expect("non-empty heap");
        let m = 0.5 * (seg.a + seg.b);
        if m <= seg.a || m >= seg.b {
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk15(&f, seg.a, m);
        let (v2, e2) = gk15(&f, m, seg.b);
        total = total - seg.value + v1 + v2;
        total_err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: m, value: v1, err: e1 });
        heap.push(Segment { a: m, b: seg.b, value: v2, err: e2 });
        count += 1;
    }
    if !total.magnitude().is_finite() {
        return Err(Error::Quadrature("non-finite integrand".into()));
    }
    let total_err = heap.iter().map(|s| s.err).sum::<f64>();
    Ok(Estimate { value: total, error: total_err })
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Fixed Gauss-Legendre rule mapped to arbitrary panels.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    /// Nodes and weights of the rule mapped to `[a, b]`.
    pub fn panel(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (c + h * x, h * w))
    }

    /// Integral of `f` over `[a, b]` split into `panels` equal panels.
    pub fn integrate<T: QuadValue>(&self, f: impl Fn(f64) -> T, a: f64, b: f64, panels: usize) -> T {
        let h = (b - a) / panels as f64;
        let mut acc = T::zero();
        for p in 0..panels {
            let lo = a + h * p as f64;
            for (x, w) in self.panel(lo, lo + h) {
                acc = acc + f(x) * w;
            }
        }
        acc
    }
}

/// Filon-type rule for `int_a^b g(s) exp(i omega s) ds` on a single panel: `g` is
/// interpolated at `n` Chebyshev-Lobatto points and the oscillatory factor is integrated
/// exactly against the interpolant.
#[derive(Clone, Debug)]
pub struct FilonRule {
    nodes: Vec<f64>,
    fallback: GaussLegendre,
}

impl FilonRule {
    pub fn new(n: usize) -> Self {
        let nodes = (0..n).map(|j| -(std::f64::consts::PI * j as f64 / (n - 1) as f64).cos()).collect();
        Self { nodes, fallback: GaussLegendre::new(2 * n + 8) }
    }

    /// Number of interpolation nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Whether the rule has no nodes.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interpolation nodes mapped to `[a, b]`.
    pub fn nodes(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().map(move |&x| c + h * x)
    }

    /// Panel integral given the values of `g` at [`FilonRule::nodes`].
    pub fn apply(&self, values: &[Complex64], a: f64, b: f64, omega: f64) -> Complex64 {
        let n = self.nodes.len();
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let theta = omega * h;
        let weights = self.weights(theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            acc += weights[j] * values[j];
        }
        acc * Complex64::new(0.0, omega * c).exp() * h
    }

    fn weights(&self, theta: f64) -> Vec<Complex64> {
        let n = self.nodes.len();
        // Moments of the Lagrange basis polynomials against exp(i theta tau) on [-1, 1].
        let moments = self.monomial_moments(theta);
        // Solve V^T w = moments with V_{jk} = tau_j^k.
        let mut mat = vec![vec![0.0f64; n]; n];
        for (k, row) in mat.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.nodes[j].powi(k as i32);
            }
        }
        solve_real_matrix_complex_rhs(mat, moments)
    }

    fn monomial_moments(&self, theta: f64) -> Vec<Complex64> {
        let n = self.nodes.len();
        let mut mu = vec![Complex64::new(0.0, 0.0); n];
        if theta.abs() > n as f64 + 2.0 {
            let i_theta = Complex64::new(0.0, theta);
            let ep = Complex64::new(0.0, theta).exp();
            let em = Complex64::new(0.0, -theta).exp();
            mu[0] = (ep - em) / i_theta;
            for j in 1..n {
                let sgn = if j % 2 == 0 { 1.0 } else { -1.0 };
                mu[j] = (ep - em * sgn - mu[j - 1] * j as f64) / i_theta;
            }
        } else {
            for (x, w) in self.fallback.panel(-1.0, 1.0) {
                let e = Complex64::new(0.0, theta * x).exp() * w;
                let mut xp = 1.0;
                for m in mu.iter_mut() {
                    *m += e * xp;
                    xp *= x;
                }
            }
        }
        mu
    }
}

fn solve_real_matrix_complex_rhs(mut a: Vec<Vec<f64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                let bc = b[col];
                b[row] -= bc * f;
            }
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= x[k] * a[row][k];
        }
        x[row] = s / a[row][row];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(10);
        let v: f64 = gl.integrate(|x| x.powi(19) + 3.0 * x.powi(18), -1.0, 1.0, 1);
        assert!((v - 6.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kinks() {
        let e = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], 1e-14, 1e-14).unwrap();
        assert!((e.value - (0.045 + 0.245)).abs() < 1e-14);
        let e = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &[], 1e-12, 1e-12).unwrap();
        assert!((e.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn filon_matches_closed_form() {
        let rule = FilonRule::new(9);
        for &omega in &[0.0, 3.0, 40.0, 900.0] {
            let (a, b) = (1.0, 2.0);
            let vals: Vec<Complex64> = rule.nodes(a, b).map(|s| Complex64::new(1.0 / s, 0.0)).collect();
            let got = rule.apply(&vals, a, b, omega);
            let gl = GaussLegendre::new(40);
            let want: Complex64 = gl.integrate(|s| Complex64::new(0.0, omega * s).exp() / s, a, b, 200);
            assert!((got - want).norm() < 1e-7, "omega={omega}: {got} vs {want}");
        }
    }
}
