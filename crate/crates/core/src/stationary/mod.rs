//! Real stationary states of the cubic equation: effective scalar equations, branch solving,
//! saddle-node detection, slope-based stability labels and the real-reduction check.

mod bifurcation;
mod continuation;
mod effective;
mod figure1;
mod reduction;
mod solve;
mod stability;
mod state;

pub use bifurcation::{
    find_all_bifurcations, find_bifurcations, fold_root_counts, h_p_derivative, BifurcationPoint, SearchBox,
};
pub use continuation::{coords_of, trace_curve, CurveCoords, CurvePoint, TraceOptions};
pub use effective::{
    ell_sign, h_defocusing, h_defocusing_reduced, h_focusing, h_focusing_reduced, EffectiveEquation, Regime,
};
pub use solve::{default_p_grid, effective_roots, in_domain, solve_branch, BranchOptions};
pub use state::{norm_mu_sq, norm_mu_sq_quadrature, reconstruct, StateInvariants, StationaryState};
pub use figure1::{figure1_dataset, Figure1Dataset, Figure1Options, Figure1Row, LabelledBranch};
pub use reduction::{check_real_reduction, RealReductionReport};
pub use stability::{stability_slope, BranchSample, SlopeClass, SlopeEntry, SLOPE_CAVEAT};
