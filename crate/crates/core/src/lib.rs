//! Robust kernel regression with cross-validated bandwidth selection.
//!
//! The smoother is an M-estimator: at each `x` it returns the zero of
//! `Σ α_i(x) ψ̃(y_i − θ)` for kernel weights `α_i`. Bandwidths are chosen by
//! minimizing a leave-one-out criterion over a grid, either the classical mean
//! squared prediction error (CRVD) or its robust counterpart (RCRVD), which
//! passes each prediction error through a loss `ρ` that discounts extreme
//! values. A robust plug-in selector and Monte Carlo tooling round it out.
//!
//! ```
//! use robust_cv::prelude::*;
//!
//! let y: Vec<f64> = (1..=64).map(|i| (i as f64 / 10.0).sin()).collect();
//! let data = Dataset::equispaced(y).unwrap();
//! let cfg = SmootherConfig::default(); // Huber c = 0.5, Gaussian kernel, NW weights
//! let grid = BandwidthGrid::log_spaced(0.02, 0.3, 20).unwrap();
//! let curve = rcrvd(&cfg, RhoFunction::AbsoluteValue, &data, &grid).unwrap();
//! assert!(curve.argmin_h >= 0.02 && curve.argmin_h <= 0.3);
//! ```

pub mod cli;
pub mod error;
pub mod kernel;
pub mod noise;
pub mod quadrature;
pub mod rho;
pub mod selectors;
pub mod simlab;
pub mod smoother;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::kernel::Kernel;
    pub use crate::noise::{NoiseModel, PsiExpectations, SpreadConvention};
    pub use crate::rho::RhoFunction;
    pub use crate::selectors::{
        ase, crvd, mase_asymptotic, minimize_curve, plug_in_bandwidth, plug_in_k, rcrvd, roughness_estimate,
        sigma_r, BandwidthGrid, CriterionCurve, PlugInConfig, TrueCurve,
    };
    pub use crate::smoother::{
        robust_curve, robust_curve_binned, robust_fit_at, weights_at, Boundary, Dataset, SmootherConfig,
        WeightKind, WeightScheme,
    };
}
