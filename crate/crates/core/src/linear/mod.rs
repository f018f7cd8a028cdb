//! The linear problem: bound state, resolvent and evolution kernels, and dispersive decay.

mod dispersive;
mod kernel;
mod params;
mod spectrum;

pub use dispersive::{
    dispersive_check, eigenstate_field, gaussian_field, ia_closed_form, kernel_propagate_at, lemma1_bound_check,
    lemma2_bounds_check, lemma2_q, project_continuum, propagate_continuum, Backend, DispersiveOptions,
    DispersiveReport, DispersiveRow, Lemma1Report, Lemma2Report,
};
pub use kernel::{
    calg, evolution_kernel, evolution_kernel_with, principal_value_j, q_factor, q_factor_exponential, q_over_k,
    resolvent_kernel, w_factor, KernelOptions, KernelValue,
};
pub use params::ModelParams;
pub use spectrum::{bound_state, eigenfunction_bounds_check, BoundState, EigenfunctionBounds, SpectralData};
