//! Linear and nonlinear Schroedinger dynamics on the half-line `x > 0` with a Dirichlet
//! wall at the origin and a delta-shell interaction of strength `alpha` at `x = a`.
//!
//! The crate is organised by capability:
//!
//! * [`specfun`]: Lambert W, complete elliptic integral `K`, Jacobi elliptic functions, Fresnel.
//! * [`linear`]: bound state, resolvent and evolution kernels, dispersive decay checks.
//! * [`stationary`]: nonlinear stationary states built from Jacobi functions, their branches,
//!   bifurcation points and the slope stability criterion.
//! * [`dynamics`]: split-step time integration with conservation and virial diagnostics,
//!   and the blow-up classifier.
//! * [`cli`]: the `winter-nls` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod linear;
pub mod quad;
pub mod specfun;
pub mod stationary;

pub use error::{Error, Result};
