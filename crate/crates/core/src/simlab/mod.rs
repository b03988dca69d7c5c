//! Monte Carlo laboratory: seeded scenarios, selector portfolios and
//! aggregation into relative-error tables and bandwidth summaries.

mod scenario;
mod study;

pub use scenario::{generate, standard_noise_levels, Scenario, TruthSpec};
pub use study::{
    bin_index, run_replicate, run_section, run_study, standard_methods, GridSpec, MethodKind, MethodOutcome,
    MethodSpec, MethodSummary, NoiseSection, ReplicateRecord, SectionReport, StudyDefinition, StudyReport,
    BIN_EDGES, BIN_LABELS,
};
