//! Special functions: Lambert W, complete elliptic integral of the first kind,
//! Jacobi elliptic functions and Fresnel integrals.

mod elliptic;
mod fresnel;
mod jacobi;
mod lambert;

pub use elliptic::{elliptic_k, EllipticModulus};
pub use fresnel::fresnel;
pub use jacobi::{jacobi, jacobi_cs, JacobiEvaluator, JacobiTriple};
pub use lambert::{lambert_w0, lambert_wm1};
