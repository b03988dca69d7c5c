use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("empty neighborhood at x = {x} (h = {h})")]
    EmptyNeighborhood { x: f64, h: f64 },

    #[error("could not bracket the root of the psi equation at x = {x}")]
    BracketFailure { x: f64 },

    #[error("solver did not converge in {iterations} iterations (last residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("quadrature did not converge (estimated error {achieved:e}, requested {requested:e})")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("criterion value is NaN at h = {h}")]
    NanCriterion { h: f64 },

    #[error("flat curve, plug-in undefined (roughness {0})")]
    FlatCurve(f64),

    #[error("degenerate pilot fit: {0}")]
    DegeneratePilot(String),

    #[error("at grid index {index}: {source}")]
    AtGridPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("at h = {h}, i = {i}: {source}")]
    AtObservation {
        h: f64,
        i: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("csv: {0}")]
    Csv(String),

    #[error("io: {0}")]
    Io(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// Strips grid-point/observation context and returns the underlying cause.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtGridPoint { source, .. } | Error::AtObservation { source, .. } => source.root(),
            other => other,
        }
    }

    /// Short machine-readable tag, used by the CLI error record and the C status codes.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InvalidDataset(_) => "invalid_dataset",
            Error::EmptyNeighborhood { .. } => "empty_neighborhood",
            Error::BracketFailure { .. } => "bracket_failure",
            Error::MaxIterations { .. } => "max_iterations",
            Error::Quadrature { .. } => "quadrature",
            Error::NanCriterion { .. } => "nan_criterion",
            Error::FlatCurve(_) => "flat_curve",
            Error::DegeneratePilot(_) => "degenerate_pilot",
            Error::Csv(_) => "csv",
            Error::Io(_) => "io",
            Error::Config(_) => "config",
            Error::AtGridPoint { .. } | Error::AtObservation { .. } => unreachable!(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
