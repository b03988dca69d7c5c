//! Bandwidth selection: cross-validation criteria, error criteria and the
//! robust plug-in rule, all evaluated on a fixed bandwidth grid.

mod criteria;
mod grid;
mod mase;
mod plugin;
mod truth;

pub use criteria::{ase, crvd, loo_residual_table, rcrvd, CriterionTable};
pub use grid::{minimize_curve, BandwidthGrid, CriterionCurve};
pub use mase::{mase_asymptotic, mase_asymptotic_with};
pub use plugin::{
    median_in_place, plug_in_bandwidth, plug_in_k, roughness_estimate, sigma_r, sigma_r_from, PlugInConfig, PlugInSelection,
};
pub use truth::TrueCurve;
