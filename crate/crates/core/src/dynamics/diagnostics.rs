use super::field::WaveField;
use super::Nonlinearity;
use crate::linear::ModelParams;
use serde::{Deserialize, Serialize};

/// Diagnostics of one field snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub norm_sq: f64,
    pub energy: f64,
    #[serde(rename = "I_q")]
    pub i_q: f64,
    #[serde(rename = "I_q_dot")]
    pub i_q_dot: f64,
    #[serde(rename = "I_q_ddot")]
    pub i_q_ddot: f64,
    pub sup_norm: f64,
    pub h1_norm: f64,
    #[serde(rename = "boundary_term_T")]
    pub boundary_term_t: f64,
}

impl DiagnosticsRecord {
    /// Column names in CSV order.
    pub const COLUMNS: [&'static str; 9] =
        ["t", "norm_sq", "energy", "I_q", "I_q_dot", "I_q_ddot", "sup_norm", "h1_norm", "boundary_term_T"];

    /// Values in CSV order.
    pub fn values(&self) -> [f64; 9] {
        [
            self.t,
            self.norm_sq,
            self.energy,
            self.i_q,
            self.i_q_dot,
            self.i_q_ddot,
            self.sup_norm,
            self.h1_norm,
            self.boundary_term_t,
        ]
    }

    /// Computes all diagnostics of `psi` at time `t`.
    pub fn compute(t: f64, psi: &WaveField, params: &ModelParams, nl: &Nonlinearity, q: f64) -> Self {
        Self {
            t,
            norm_sq: psi.norm_sq(),
            energy: energy(psi, params, nl),
            i_q: moment_of_inertia(psi, q),
            i_q_dot: virial_first(psi, q),
            i_q_ddot: virial_second(psi, q, params, nl),
            sup_norm: psi.sup_norm(),
            h1_norm: psi.h1_norm(),
            boundary_term_t: boundary_term(psi, q),
        }
    }
}

/// Energy `||psi'||^2 + alpha |psi(a)|^2 + eta/(sigma+1) ||psi||_{2 sigma + 2}^{2 sigma + 2}`.
///
/// The gradient uses forward differences on each cell, so no difference straddles the
/// derivative jump at the shell node. This is the energy conserved by the semi-discrete flow.
pub fn energy(psi: &WaveField, params: &ModelParams, nl: &Nonlinearity) -> f64 {
    let kinetic = psi.gradient_norm_sq();
    let shell = params.alpha * psi.values[psi.j_a].norm_sqr();
    let potential = if nl.eta == 0.0 { 0.0 } else { nl.eta / (nl.sigma + 1.0) * psi.lp_power(nl.sigma) };
    kinetic + shell + potential
}

/// Moment of inertia `I_q = int (x - q)^2 |psi|^2 dx`.
pub fn moment_of_inertia(psi: &WaveField, q: f64) -> f64 {
    psi.values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let d = psi.x(j) - q;
            d * d * v.norm_sqr()
        })
        .sum::<f64>()
        * psi.dx
}

fn centered_moment(psi: &WaveField, q: f64) -> num_complex::Complex64 {
    // <psi, (x - q) psi'> with centered differences at interior nodes; the end nodes carry
    // psi = 0 and contribute nothing.
    let v = &psi.values;
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for j in 1..v.len() - 1 {
        let d = (v[j + 1] - v[j - 1]) / (2.0 * psi.dx);
        acc += v[j].conj() * d * (psi.x(j) - q);
    }
    acc * psi.dx
}

/// First virial `dI_q/dt = 4 Im <psi, (x - q) psi'>`.
///
/// With centered differences this equals exactly the time derivative of the discrete moment
/// of inertia along the semi-discrete flow.
pub fn virial_first(psi: &WaveField, q: f64) -> f64 {
    4.0 * centered_moment(psi, q).im
}

/// Residual `|4 Re <psi, (x - q) psi'> + 2 ||psi||^2|` of the real-part virial identity.
pub fn virial_real_identity_check(psi: &WaveField, q: f64) -> f64 {
    (4.0 * centered_moment(psi, q).re + 2.0 * psi.norm_sq()).abs()
}

/// One-sided second-order derivatives `(psi'(0+), psi'(a-), psi'(a+))`.
pub fn one_sided_derivatives(psi: &WaveField) -> (num_complex::Complex64, num_complex::Complex64, num_complex::Complex64) {
    let v = &psi.values;
    let h2 = 2.0 * psi.dx;
    let j = psi.j_a;
    let d0 = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / h2;
    let dm = (3.0 * v[j] - 4.0 * v[j - 1] + v[j - 2]) / h2;
    let dp = (-3.0 * v[j] + 4.0 * v[j + 1] - v[j + 2]) / h2;
    (d0, dm, dp)
}

/// Boundary term `T = q |psi'(0+)|^2 - (a - q)(|psi'(a+)|^2 - |psi'(a-)|^2)`.
pub fn boundary_term(psi: &WaveField, q: f64) -> f64 {
    let (d0, dm, dp) = one_sided_derivatives(psi);
    q * d0.norm_sqr() - (psi.a() - q) * (dp.norm_sqr() - dm.norm_sqr())
}

/// Second virial
/// `d^2 I_q/dt^2 = 8 E - 4 alpha |psi(a)|^2 + 4 eta (sigma - 2)/(sigma + 1) ||psi||^{2 sigma + 2} - 4 T`.
pub fn virial_second(psi: &WaveField, q: f64, params: &ModelParams, nl: &Nonlinearity) -> f64 {
    8.0 * energy(psi, params, nl) - 4.0 * params.alpha * psi.values[psi.j_a].norm_sqr()
        + nonlinear_virial_term(psi, nl)
        - 4.0 * boundary_term(psi, q)
}

/// Upper bound for `d^2 I_a/dt^2` obtained by dropping the non-negative boundary term at `q = a`:
/// `8 E - 4 alpha |psi(a)|^2 + 4 eta (sigma - 2)/(sigma + 1) ||psi||^{2 sigma + 2}`.
pub fn virial_bound_at_shell(psi: &WaveField, params: &ModelParams, nl: &Nonlinearity) -> f64 {
    8.0 * energy(psi, params, nl) - 4.0 * params.alpha * psi.values[psi.j_a].norm_sqr() + nonlinear_virial_term(psi, nl)
}

fn nonlinear_virial_term(psi: &WaveField, nl: &Nonlinearity) -> f64 {
    if nl.eta == 0.0 {
        0.0
    } else {
        4.0 * nl.eta * (nl.sigma - 2.0) / (nl.sigma + 1.0) * psi.lp_power(nl.sigma)
    }
}
