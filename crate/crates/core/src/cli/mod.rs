//! Command-line front end: CSV ingestion, bandwidth selection and smoothing on
//! real data, and the simulation-study runner.

mod args;
mod commands;
mod config;
mod ingest;
mod output;
mod threshold;

pub use args::{Cli, Command, Flags};
pub use commands::{cmd_select, cmd_simulate, cmd_smooth, run, run_from_env, SelectOutput, SelectedMethod, SmoothOutput};
pub use config::{parse_grid, parse_methods, MethodChoice, OutputFormat, RhoSpec, RunConfig};
pub use ingest::{ingest_csv, ingest_reader, Ingested};
pub use output::fmt_f64;
pub use threshold::{auto_threshold, threshold_from_residuals, DEFAULT_MAD_DIVISOR, HUBER_EFFICIENCY_CONSTANT};
