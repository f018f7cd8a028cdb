//! Time-dependent nonlinear evolution `i psi_t = H psi + eta |psi|^{2 sigma} psi` on a grid,
//! conservation and virial diagnostics, and blow-up classification.

mod blowup;
mod diagnostics;
mod evolve;
mod field;

pub use blowup::{classify_blowup, BlowupVerdict, Classification, ProbeOutcome, Rule};
pub use diagnostics::{
    boundary_term, energy, moment_of_inertia, one_sided_derivatives, virial_bound_at_shell, virial_first,
    virial_real_identity_check, virial_second, DiagnosticsRecord,
};
pub use evolve::{evolve, evolve_linear, evolve_with_observer, BlowupHalt, CrankNicolson, EvolveOptions, Trajectory};
pub use field::WaveField;

use serde::{Deserialize, Serialize};

/// Power nonlinearity `eta |psi|^{2 sigma} psi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub eta: f64,
    pub sigma: f64,
}

impl Nonlinearity {
    /// The linear problem.
    pub fn linear() -> Self {
        Self { eta: 0.0, sigma: 1.0 }
    }
}
