//! Kernel weights and the robust (M-type) kernel smoother.

mod binned;
mod dataset;
mod fit;
mod weights;

pub use binned::{bin_centers, robust_curve_binned, MAX_BINS};
pub use dataset::Dataset;
pub use fit::{design_fits, robust_curve, robust_fit_at, solve_psi_equation, DesignFits, SmootherConfig};
pub use weights::{weights_at, weights_excluding, Boundary, WeightKind, WeightScheme};
