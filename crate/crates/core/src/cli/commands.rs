use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use super::args::{Cli, Command};
use super::config::{MethodChoice, OutputFormat, RhoSpec, RunConfig};
use super::ingest::{ingest_csv, Ingested};
use super::output::{csv_text, emit, fmt_f64, to_json};
use super::threshold::auto_threshold;
use crate::error::{Error, Result};
use crate::rho::RhoFunction;
use crate::selectors::{loo_residual_table, plug_in_bandwidth, BandwidthGrid, CriterionTable, PlugInConfig};
use crate::simlab::{run_study, StudyDefinition, StudyReport, BIN_LABELS};
use crate::smoother::{robust_curve, SmootherConfig, WeightScheme};

const BUNDLED_STUDY: &str = include_str!("../../studies/sine_257.json");

/// One selector's result. Bandwidths are in original x units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectedMethod {
    pub method: String,
    pub selected_h: f64,
    /// Criterion values over the grid; absent for the plug-in rule.
    pub h: Option<Vec<f64>>,
    pub values: Option<Vec<f64>>,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectOutput {
    pub x_offset: f64,
    pub x_scale: f64,
    pub rho_tilde: RhoFunction,
    pub warnings: Vec<String>,
    pub methods: Vec<SelectedMethod>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothOutput {
    pub h: f64,
    pub rho_tilde: RhoFunction,
    pub warnings: Vec<String>,
    pub x: Vec<f64>,
    pub fit: Vec<f64>,
}

struct Prepared {
    ingested: Ingested,
    cfg: SmootherConfig,
    warnings: Vec<String>,
}

fn prepare(run: &RunConfig) -> Result<Prepared> {
    let input = run.input.as_ref().ok_or_else(|| Error::Config("--input is required".into()))?;
    let ingested = ingest_csv(input, &run.x_col, &run.y_col)?;
    let mut cfg = SmootherConfig {
        kernel: run.kernel,
        weights: WeightScheme::new(run.weights, run.boundary),
        ..SmootherConfig::default()
    };
    let mut warnings = ingested.warnings.clone();
    cfg.rho_tilde = match run.rho_tilde_spec()? {
        RhoSpec::Fixed(rho) => rho,
        RhoSpec::HuberAuto => {
            let pilot = run
                .pilot_h
                .ok_or_else(|| Error::Config("huber:auto needs --pilot-h".into()))?;
            let c = auto_threshold(&cfg, &ingested.data, ingested.to_internal_h(pilot), run.mad_divisor)?;
            warnings.push(format!("huber:auto chose c = {c}"));
            RhoFunction::huber(c)?
        }
    };
    cfg.validate()?;
    Ok(Prepared {
        ingested,
        cfg,
        warnings,
    })
}

/// The requested grid in original units and its image in internal units.
fn grids(run: &RunConfig, ingested: &Ingested) -> Result<(BandwidthGrid, BandwidthGrid)> {
    let original = run.grid_spec()?.build()?;
    let internal = BandwidthGrid::new(original.values().iter().map(|&h| ingested.to_internal_h(h)).collect())?;
    Ok((original, internal))
}

fn select_all(run: &RunConfig, prep: &Prepared, methods: &[MethodChoice]) -> Result<Vec<SelectedMethod>> {
    let (original, grid) = grids(run, &prep.ingested)?;
    let rho_cv = run.rho_cv_function()?;
    let data = &prep.ingested.data;
    let needs_table = methods.iter().any(|m| !matches!(m, MethodChoice::Plugin(_)));
    let table: Option<CriterionTable> = if needs_table {
        Some(loo_residual_table(&prep.cfg, data, &grid, false)?)
    } else {
        None
    };
    let to_orig = |h: f64| prep.ingested.to_original_h(h);
    methods
        .iter()
        .map(|m| {
            let tag = m.tag(rho_cv);
            match *m {
                MethodChoice::Plugin(h0) => {
                    let plugin = PlugInConfig {
                        kernel: prep.cfg.kernel,
                        rho_tilde: prep.cfg.rho_tilde,
                        ..PlugInConfig::new(prep.ingested.to_internal_h(h0))
                    };
                    let sel = plug_in_bandwidth(&prep.cfg, data, &plugin, Some(&grid))?;
                    Ok(SelectedMethod {
                        method: tag,
                        selected_h: to_orig(sel.h),
                        h: None,
                        values: None,
                        warning: sel.warning,
                    })
                }
                MethodChoice::Crvd | MethodChoice::Rcrvd(_) => {
                    let table = table.as_ref().expect("table built for criteria");
                    let curve = match m {
                        MethodChoice::Crvd => table.crvd()?,
                        MethodChoice::Rcrvd(r) => table.rcrvd(r.unwrap_or(rho_cv))?,
                        MethodChoice::Plugin(_) => unreachable!(),
                    };
                    Ok(SelectedMethod {
                        method: tag,
                        selected_h: original.values()[curve.argmin_index],
                        h: Some(original.values().to_vec()),
                        values: Some(curve.values),
                        warning: None,
                    })
                }
            }
        })
        .collect()
}

/// Criterion curves and selected bandwidths for every requested method.
pub fn cmd_select(run: &RunConfig) -> Result<SelectOutput> {
    let prep = prepare(run)?;
    let methods = select_all(run, &prep, &run.methods()?)?;
    Ok(SelectOutput {
        x_offset: prep.ingested.offset,
        x_scale: prep.ingested.scale,
        rho_tilde: prep.cfg.rho_tilde,
        warnings: prep.warnings,
        methods,
    })
}

/// The fitted curve on `points` equispaced x values, at `--h` or at the
/// bandwidth chosen by the first method.
pub fn cmd_smooth(run: &RunConfig) -> Result<SmoothOutput> {
    let mut prep = prepare(run)?;
    if run.points < 2 {
        return Err(Error::Config("need at least 2 evaluation points".into()));
    }
    let h = match run.h {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => return Err(Error::Config(format!("bandwidth must be positive, got {h}"))),
        None => {
            let first = run.methods()?[0];
            let chosen = select_all(run, &prep, &[first])?.remove(0);
            prep.warnings.push(format!("bandwidth {} selected by {}", chosen.selected_h, chosen.method));
            chosen.selected_h
        }
    };
    let t: Vec<f64> = (0..run.points).map(|k| k as f64 / (run.points - 1) as f64).collect();
    let fit = robust_curve(&prep.cfg, &prep.ingested.data, &t, prep.ingested.to_internal_h(h))?;
    Ok(SmoothOutput {
        h,
        rho_tilde: prep.cfg.rho_tilde,
        warnings: prep.warnings,
        x: t.iter().map(|&v| prep.ingested.to_original_x(v)).collect(),
        fit,
    })
}

/// Runs the study named by `--study`, or the bundled one.
pub fn cmd_simulate(run: &RunConfig) -> Result<StudyReport> {
    let text = match &run.study {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => BUNDLED_STUDY.to_string(),
    };
    let mut def: StudyDefinition = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(r) = run.replicates {
        def.replicates = r;
    }
    if let Some(seed) = run.seed {
        def.base_seed = seed;
    }
    run_study(&def)
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn render_select(out: &SelectOutput, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(out),
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            for m in &out.methods {
                match (&m.h, &m.values) {
                    (Some(hs), Some(vs)) => {
                        for (h, v) in hs.iter().zip(vs) {
                            let chosen = if *h == m.selected_h { "1" } else { "0" };
                            rows.push(vec![m.method.clone(), fmt_f64(*h), fmt_f64(*v), chosen.into()]);
                        }
                    }
                    _ => rows.push(vec![m.method.clone(), fmt_f64(m.selected_h), String::new(), "1".into()]),
                }
            }
            csv_text(&["method", "h", "value", "selected"], &rows)
        }
    }
}

fn render_smooth(out: &SmoothOutput, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(out),
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = out.x.iter().zip(&out.fit).map(|(x, f)| vec![fmt_f64(*x), fmt_f64(*f)]).collect();
            csv_text(&["x", "fit"], &rows)
        }
    }
}

fn render_study(report: &StudyReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(report),
        OutputFormat::Csv => {
            let mut header = vec!["section", "method"];
            header.extend(BIN_LABELS);
            header.extend(["mean_h", "var_h", "sd_h", "replicates", "errors"]);
            let mut rows = Vec::new();
            for s in &report.sections {
                let entries = std::iter::once(("ase", &s.ase)).chain(s.methods.iter().map(|(k, v)| (k.as_str(), v)));
                for (tag, m) in entries {
                    let mut row = vec![s.label.clone(), tag.to_string()];
                    row.extend(m.bins.iter().map(|b| b.to_string()));
                    row.extend([opt(m.mean_h), opt(m.var_h), opt(m.sd_h), m.replicates.to_string(), m.errors.to_string()]);
                    rows.push(row);
                }
            }
            csv_text(&header, &rows)
        }
    }
}

/// Dispatches a parsed command line and writes its output.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Select(flags) => {
            let cfg = flags.resolve()?;
            let text = render_select(&cmd_select(&cfg)?, cfg.format.unwrap_or_default())?;
            emit(cfg.out.as_deref(), &text)
        }
        Command::Smooth(flags) => {
            let cfg = flags.resolve()?;
            let text = render_smooth(&cmd_smooth(&cfg)?, cfg.format.unwrap_or_default())?;
            emit(cfg.out.as_deref(), &text)
        }
        Command::Simulate(flags) => {
            let cfg = flags.resolve()?;
            let text = render_study(&cmd_simulate(&cfg)?, cfg.format.unwrap_or(OutputFormat::Json))?;
            emit(cfg.out.as_deref(), &text)
        }
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    kind: &'a str,
    message: String,
}

/// Binary entry point: errors go to stderr as a one-line JSON record.
pub fn run_from_env() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::json!({ "error": ErrorRecord { kind: e.kind(), message: e.to_string() } });
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}
