use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::threshold::DEFAULT_MAD_DIVISOR;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::rho::RhoFunction;
use crate::simlab::GridSpec;
use crate::smoother::{Boundary, WeightKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

/// Smoother loss, either fixed or `huber:auto` (threshold from a pilot fit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoSpec {
    Fixed(RhoFunction),
    HuberAuto,
}

impl FromStr for RhoSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("huber:auto") {
            Ok(RhoSpec::HuberAuto)
        } else {
            s.parse().map(RhoSpec::Fixed)
        }
    }
}

impl fmt::Display for RhoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoSpec::Fixed(r) => r.fmt(f),
            RhoSpec::HuberAuto => f.write_str("huber:auto"),
        }
    }
}

/// A selector named on the command line. Plug-in pilot bandwidths are in original x units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodChoice {
    Crvd,
    Rcrvd(Option<RhoFunction>),
    Plugin(f64),
}

impl MethodChoice {
    /// Tag used in output, with the criterion loss resolved.
    pub fn tag(&self, rho_cv: RhoFunction) -> String {
        match self {
            MethodChoice::Crvd => "crvd".into(),
            MethodChoice::Rcrvd(r) => format!("rcrvd:{}", r.unwrap_or(rho_cv)),
            MethodChoice::Plugin(h0) => format!("plugin:{h0}"),
        }
    }
}

impl FromStr for MethodChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        match (head.to_ascii_lowercase().as_str(), rest) {
            ("crvd", "") => Ok(MethodChoice::Crvd),
            ("rcrvd", "") => Ok(MethodChoice::Rcrvd(None)),
            ("rcrvd", rho) => Ok(MethodChoice::Rcrvd(Some(rho.parse()?))),
            ("plugin", h0) => {
                let h0: f64 = h0
                    .parse()
                    .map_err(|_| Error::Config(format!("plug-in needs a pilot bandwidth, got '{s}'")))?;
                if !(h0 > 0.0 && h0.is_finite()) {
                    return Err(Error::Config(format!("pilot bandwidth must be positive, got {h0}")));
                }
                Ok(MethodChoice::Plugin(h0))
            }
            _ => Err(Error::Config(format!("unknown method '{s}'"))),
        }
    }
}

/// Comma-separated method list.
pub fn parse_methods(s: &str) -> Result<Vec<MethodChoice>> {
    let methods: Vec<MethodChoice> = s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    if methods.is_empty() {
        return Err(Error::Config("no method given".into()));
    }
    Ok(methods)
}

/// `min:max:count[:log|:linear]`, log spacing by default.
pub fn parse_grid(s: &str) -> Result<GridSpec> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let bad = || Error::Config(format!("grid must look like min:max:count[:log|:linear], got '{s}'"));
    if !(3..=4).contains(&parts.len()) {
        return Err(bad());
    }
    let min: f64 = parts[0].parse().map_err(|_| bad())?;
    let max: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    let log = match parts.get(3) {
        None | Some(&"log") => true,
        Some(&"lin") | Some(&"linear") => false,
        Some(_) => return Err(bad()),
    };
    let spec = GridSpec { min, max, count, log };
    spec.build()?;
    Ok(spec)
}

/// Settings for one CLI invocation. Field names double as JSON config keys;
/// every bandwidth is in the units of the input x column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub x_col: String,
    pub y_col: String,
    pub kernel: Kernel,
    pub weights: WeightKind,
    pub boundary: Boundary,
    pub rho_tilde: String,
    pub rho_cv: String,
    pub grid: Option<GridSpec>,
    pub method: String,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub pilot_h: Option<f64>,
    pub mad_divisor: f64,
    /// Bandwidth for `smooth`; selected with the first method when absent.
    pub h: Option<f64>,
    /// Number of equispaced evaluation points for `smooth`.
    pub points: usize,
    pub study: Option<PathBuf>,
    pub replicates: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            x_col: "x".into(),
            y_col: "y".into(),
            kernel: Kernel::Gaussian,
            weights: WeightKind::NadarayaWatson,
            boundary: Boundary::None,
            rho_tilde: "huber:0.5".into(),
            rho_cv: "huber:0.5".into(),
            grid: None,
            method: "rcrvd".into(),
            seed: None,
            out: None,
            format: None,
            pilot_h: None,
            mad_divisor: DEFAULT_MAD_DIVISOR,
            h: None,
            points: 201,
            study: None,
            replicates: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn rho_tilde_spec(&self) -> Result<RhoSpec> {
        self.rho_tilde.parse()
    }

    pub fn rho_cv_function(&self) -> Result<RhoFunction> {
        self.rho_cv.parse()
    }

    pub fn methods(&self) -> Result<Vec<MethodChoice>> {
        parse_methods(&self.method)
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        self.grid
            .ok_or_else(|| Error::Config("a bandwidth grid is required (--grid min:max:count[:log])".into()))
    }
}
