use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{parse_grid, OutputFormat, RunConfig};
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "robust-cv", version, about = "Robust kernel smoothing and bandwidth selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the smoother at a given or selected bandwidth.
    Smooth(Flags),
    /// Evaluate bandwidth-selection criteria over a grid.
    Select(Flags),
    /// Run a Monte Carlo study.
    Simulate(Flags),
}

/// Flags shared by all subcommands. Anything given here overrides `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON file with `RunConfig` fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV file with a header row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Column holding the design points (default `x`).
    #[arg(long)]
    pub x_col: Option<String>,
    /// Column holding the responses (default `y`).
    #[arg(long)]
    pub y_col: Option<String>,
    /// gaussian | epanechnikov | uniform
    #[arg(long)]
    pub kernel: Option<String>,
    /// nw | gm | pc
    #[arg(long)]
    pub weights: Option<String>,
    /// circular | none
    #[arg(long)]
    pub boundary: Option<String>,
    /// Smoother loss: huber:<c> | huber:auto | l1 | l2
    #[arg(long)]
    pub rho_tilde: Option<String>,
    /// Cross-validation loss: huber:<c> | l1 | l2
    #[arg(long)]
    pub rho_cv: Option<String>,
    /// Bandwidth grid in x units: min:max:count[:log|:linear]
    #[arg(long)]
    pub grid: Option<String>,
    /// Comma-separated: crvd | rcrvd[:<rho>] | plugin:<h0>
    #[arg(long)]
    pub method: Option<String>,
    /// Base seed for `simulate`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
    /// Pilot bandwidth in x units for huber:auto.
    #[arg(long)]
    pub pilot_h: Option<f64>,
    /// Divisor turning the median absolute residual into a scale (default 0.6745).
    #[arg(long)]
    pub mad_divisor: Option<f64>,
    /// Bandwidth in x units for `smooth`.
    #[arg(long)]
    pub h: Option<f64>,
    /// Number of evaluation points for `smooth`.
    #[arg(long)]
    pub points: Option<usize>,
    /// Study definition for `simulate` (the bundled study when absent).
    #[arg(long)]
    pub study: Option<PathBuf>,
    /// Replicate count override for `simulate`.
    #[arg(long)]
    pub replicates: Option<usize>,
}

impl Flags {
    /// Loads `--config` (if any) and applies the flags on top.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = &self.input {
            cfg.input = Some(v.clone());
        }
        if let Some(v) = &self.x_col {
            cfg.x_col = v.clone();
        }
        if let Some(v) = &self.y_col {
            cfg.y_col = v.clone();
        }
        if let Some(v) = &self.kernel {
            cfg.kernel = v.parse()?;
        }
        if let Some(v) = &self.weights {
            cfg.weights = v.parse()?;
        }
        if let Some(v) = &self.boundary {
            cfg.boundary = v.parse()?;
        }
        if let Some(v) = &self.rho_tilde {
            cfg.rho_tilde = v.clone();
        }
        if let Some(v) = &self.rho_cv {
            cfg.rho_cv = v.clone();
        }
        if let Some(v) = &self.grid {
            cfg.grid = Some(parse_grid(v)?);
        }
        if let Some(v) = &self.method {
            cfg.method = v.clone();
        }
        if let Some(v) = self.seed {
            cfg.seed = Some(v);
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = &self.format {
            cfg.format = Some(v.parse::<OutputFormat>()?);
        }
        if let Some(v) = self.pilot_h {
            cfg.pilot_h = Some(v);
        }
        if let Some(v) = self.mad_divisor {
            cfg.mad_divisor = v;
        }
        if let Some(v) = self.h {
            cfg.h = Some(v);
        }
        if let Some(v) = self.points {
            cfg.points = v;
        }
        if let Some(v) = &self.study {
            cfg.study = Some(v.clone());
        }
        if let Some(v) = self.replicates {
            cfg.replicates = Some(v);
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Kernel;

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"kernel": "uniform", "x_col": "t", "mad_divisor": 0.645}"#).unwrap();
        let cli = Cli::try_parse_from([
            "robust-cv",
            "select",
            "--config",
            path.to_str().unwrap(),
            "--kernel",
            "epanechnikov",
            "--grid",
            "1:5:3",
        ])
        .unwrap();
        let Command::Select(flags) = cli.command else { panic!() };
        let cfg = flags.resolve().unwrap();
        assert_eq!(cfg.kernel, Kernel::Epanechnikov);
        assert_eq!(cfg.x_col, "t");
        assert_eq!(cfg.mad_divisor, 0.645);
        assert_eq!(cfg.grid.unwrap().count, 3);
    }
}
