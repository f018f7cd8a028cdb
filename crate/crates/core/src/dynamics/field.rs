use crate::error::{Error, Result};
use crate::linear::ModelParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex grid function on `[0, L]` with nodes `x_j = j dx`, Dirichlet values at both ends and
/// the shell position `a` on the node `j_a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveField {
    /// Right end of the truncated domain.
    #[serde(rename = "L")]
    pub l: f64,
    /// Grid spacing.
    pub dx: f64,
    /// Values at the nodes `0, dx, ..., L`.
    pub values: Vec<Complex64>,
    /// Index of the node at `x = a`.
    pub j_a: usize,
}

impl WaveField {
    /// Zero field on `[0, L]` with spacing `dx`; `a / dx` must be an integer and `L` is rounded
    /// to a whole number of cells.
    pub fn zeros(params: &ModelParams, l: f64, dx: f64) -> Result<Self> {
        params.validate()?;
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidParameter(format!("dx must be positive, got {dx}")));
        }
        let ja = params.a / dx;
        let j_a = ja.round();
        if (ja - j_a).abs() > 1e-9 * ja.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "a / dx must be an integer so the shell sits on a node (a = {}, dx = {dx})",
                params.a
            )));
        }
        let n = (l / dx).round();
        if n < j_a + 3.0 {
            return Err(Error::InvalidParameter(format!("domain L = {l} must extend beyond a = {}", params.a)));
        }
        let n = n as usize;
        Ok(Self { l: n as f64 * dx, dx, values: vec![Complex64::new(0.0, 0.0); n + 1], j_a: j_a as usize })
    }

    /// Field sampled from `f` at the interior nodes, with zero end values.
    pub fn from_fn(params: &ModelParams, l: f64, dx: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let mut w = Self::zeros(params, l, dx)?;
        let n = w.values.len();
        for j in 1..n - 1 {
            w.values[j] = f(j as f64 * dx);
        }
        Ok(w)
    }

    /// Real field sampled from `f`.
    pub fn from_real_fn(params: &ModelParams, l: f64, dx: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(params, l, dx, |x| Complex64::new(f(x), 0.0))
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Whether the grid has no nodes.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinate of node `j`.
    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    /// Shell position `a = j_a dx`.
    pub fn a(&self) -> f64 {
        self.x(self.j_a)
    }

    /// Checks the Dirichlet end values and finiteness.
    pub fn validate(&self) -> Result<()> {
        let n = self.values.len();
        if n < 4 || self.j_a == 0 || self.j_a >= n - 2 {
            return Err(Error::InvalidParameter("wave field grid too small".into()));
        }
        if self.values[0].norm() != 0.0 || self.values[n - 1].norm() != 0.0 {
            return Err(Error::InvalidParameter("wave field must vanish at both ends".into()));
        }
        if self.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Numerical("wave field contains non-finite values".into()));
        }
        Ok(())
    }

    /// Discrete inner product `<self, other> = dx sum conj(self_j) other_j`.
    pub fn inner(&self, other: &WaveField) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(u, v)| u.conj() * v).sum::<Complex64>() * self.dx
    }

    /// Squared L2 norm.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx
    }

    /// L1 norm.
    pub fn norm_l1(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum::<f64>() * self.dx
    }

    /// Maximum modulus.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Rescales to unit L2 norm.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sq().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter("cannot normalise a zero field".into()));
        }
        for v in &mut self.values {
            *v /= n;
        }
        Ok(())
    }

    /// Squared L2 norm of the forward-difference derivative.
    pub fn gradient_norm_sq(&self) -> f64 {
        let inv = 1.0 / self.dx;
        self.values.windows(2).map(|w| ((w[1] - w[0]) * inv).norm_sqr()).sum::<f64>() * self.dx
    }

    /// H1 norm `sqrt(||psi||^2 + ||psi'||^2)`.
    pub fn h1_norm(&self) -> f64 {
        (self.norm_sq() + self.gradient_norm_sq()).sqrt()
    }

    /// `sum |psi_j|^{2s+2} dx`, the `L^{2s+2}` norm raised to the power `2s+2`.
    pub fn lp_power(&self, sigma: f64) -> f64 {
        let e = sigma + 1.0;
        self.values.iter().map(|v| v.norm_sqr().powf(e)).sum::<f64>() * self.dx
    }
}
