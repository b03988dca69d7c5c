use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{generate, Scenario, TruthSpec};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::rho::RhoFunction;
use crate::selectors::{loo_residual_table, plug_in_bandwidth, BandwidthGrid, PlugInConfig};
use crate::smoother::SmootherConfig;

/// Upper edges of the relative-error bins; a value equal to an edge falls in the lower bin.
pub const BIN_EDGES: [f64; 7] = [0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 2.0];
pub const BIN_LABELS: [&str; 8] = ["<=0.1", "0.1-0.2", "0.2-0.4", "0.4-0.6", "0.6-0.8", "0.8-1", "1-2", ">2"];

pub fn bin_index(relative_error: f64) -> usize {
    BIN_EDGES.iter().position(|&edge| relative_error <= edge).unwrap_or(BIN_EDGES.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodKind {
    Crvd,
    Rcrvd { rho: RhoFunction },
    Plugin { h0: f64 },
    Ase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub tag: String,
    #[serde(flatten)]
    pub kind: MethodKind,
}

impl MethodSpec {
    pub fn new(tag: impl Into<String>, kind: MethodKind) -> Self {
        MethodSpec { tag: tag.into(), kind }
    }
}

/// CRVD, RCRVD with Huber 0.5, Huber 1 and `|u|`, and the plug-in rule at four pilot bandwidths.
pub fn standard_methods() -> Vec<MethodSpec> {
    let mut methods = vec![
        MethodSpec::new("crvd", MethodKind::Crvd),
        MethodSpec::new("rcrvd:huber:0.5", MethodKind::Rcrvd { rho: RhoFunction::Huber { c: 0.5 } }),
        MethodSpec::new("rcrvd:huber:1", MethodKind::Rcrvd { rho: RhoFunction::Huber { c: 1.0 } }),
        MethodSpec::new("rcrvd:l1", MethodKind::Rcrvd { rho: RhoFunction::AbsoluteValue }),
    ];
    for h0 in [0.02, 0.03, 0.04, 0.06] {
        methods.push(MethodSpec::new(format!("plugin:{h0}"), MethodKind::Plugin { h0 }));
    }
    methods
}

fn check_methods(methods: &[MethodSpec]) -> Result<()> {
    if methods.is_empty() {
        return Err(Error::InvalidArgument("no methods given".into()));
    }
    let mut seen = BTreeSet::new();
    for m in methods {
        if !seen.insert(m.tag.as_str()) {
            return Err(Error::InvalidArgument(format!("duplicate method tag {:?}", m.tag)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub h: Option<f64>,
    pub relative_error: Option<f64>,
    pub error: Option<String>,
}

impl MethodOutcome {
    fn failed(e: &Error) -> Self {
        MethodOutcome {
            h: None,
            relative_error: None,
            error: Some(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub seed: u64,
    pub h_ase: Option<f64>,
    pub outcomes: BTreeMap<String, MethodOutcome>,
}

/// Runs every method on one generated sample and scores it against the
/// sample's own ASE-optimal bandwidth. Method failures are recorded, not raised.
pub fn run_replicate(
    scenario: &Scenario,
    methods: &[MethodSpec],
    grid: &BandwidthGrid,
    cfg: &SmootherConfig,
) -> Result<ReplicateRecord> {
    check_methods(methods)?;
    cfg.validate()?;
    let data = generate(scenario);
    let table = loo_residual_table(cfg, &data, grid, true);
    let ase_h = match &table {
        Ok(t) => t.ase(&scenario.truth, data.x()).expect("full fits requested").map(|c| c.argmin_h),
        Err(e) => Err(e.clone()),
    };
    let h_ase = ase_h.as_ref().ok().copied();
    let outcomes = methods
        .iter()
        .map(|m| {
            let selected: Result<f64> = match (m.kind, &table) {
                (MethodKind::Ase, _) => ase_h.clone(),
                (MethodKind::Crvd, Ok(t)) => t.crvd().map(|c| c.argmin_h),
                (MethodKind::Rcrvd { rho }, Ok(t)) => t.rcrvd(rho).map(|c| c.argmin_h),
                (MethodKind::Crvd | MethodKind::Rcrvd { .. }, Err(e)) => Err(e.clone()),
                (MethodKind::Plugin { h0 }, _) => {
                    let plugin = PlugInConfig {
                        kernel: cfg.kernel,
                        rho_tilde: cfg.rho_tilde,
                        ..PlugInConfig::new(h0)
                    };
                    plug_in_bandwidth(cfg, &data, &plugin, Some(grid)).map(|s| s.h)
                }
            };
            let outcome = match selected {
                Ok(h) => MethodOutcome {
                    h: Some(h),
                    relative_error: h_ase.map(|a| (h - a).abs() / a),
                    error: None,
                },
                Err(e) => MethodOutcome::failed(&e),
            };
            (m.tag.clone(), outcome)
        })
        .collect();
    Ok(ReplicateRecord {
        seed: scenario.seed,
        h_ase,
        outcomes,
    })
}

/// Relative-error histogram and bandwidth moments for one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub bins: [usize; 8],
    pub mean_h: Option<f64>,
    /// Sample variance with divisor `count − 1`.
    pub var_h: Option<f64>,
    pub sd_h: Option<f64>,
    pub replicates: usize,
    pub errors: usize,
}

impl MethodSummary {
    fn from_values(hs: &[f64], relative_errors: &[f64], errors: usize) -> Self {
        let mut bins = [0usize; 8];
        for &e in relative_errors {
            bins[bin_index(e)] += 1;
        }
        let count = hs.len();
        let mean_h = (count > 0).then(|| hs.iter().sum::<f64>() / count as f64);
        let var_h = match mean_h {
            Some(m) if count > 1 => Some(hs.iter().map(|h| (h - m) * (h - m)).sum::<f64>() / (count - 1) as f64),
            _ => None,
        };
        MethodSummary {
            bins,
            mean_h,
            var_h,
            sd_h: var_h.map(f64::sqrt),
            replicates: count,
            errors,
        }
    }

    /// Replicates with relative error at most `threshold` (a bin edge).
    pub fn count_within(&self, threshold: f64) -> usize {
        let upto = bin_index(threshold);
        self.bins[..=upto].iter().sum()
    }

    /// Replicates with relative error above `threshold` (a bin edge).
    pub fn count_beyond(&self, threshold: f64) -> usize {
        self.bins.iter().sum::<usize>() - self.count_within(threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionReport {
    pub label: String,
    pub noise: NoiseModel,
    pub replicates: usize,
    /// Bandwidth moments of the per-replicate ASE minimizer.
    pub ase: MethodSummary,
    pub methods: BTreeMap<String, MethodSummary>,
    /// Replicates in which every method failed.
    pub failed_replicates: usize,
    pub records: Vec<ReplicateRecord>,
}

/// Runs `replicates` samples with seeds `base_seed + r` in parallel and aggregates
/// them in replicate order.
pub fn run_section(
    label: &str,
    template: &Scenario,
    methods: &[MethodSpec],
    grid: &BandwidthGrid,
    cfg: &SmootherConfig,
    replicates: usize,
    base_seed: u64,
) -> Result<SectionReport> {
    if replicates == 0 {
        return Err(Error::InvalidArgument("need at least one replicate".into()));
    }
    check_methods(methods)?;
    let records: Vec<ReplicateRecord> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| run_replicate(&template.with_seed(base_seed.wrapping_add(r)), methods, grid, cfg))
        .collect::<Result<_>>()?;

    let ase_hs: Vec<f64> = records.iter().filter_map(|r| r.h_ase).collect();
    let ase = MethodSummary::from_values(&ase_hs, &vec![0.0; ase_hs.len()], replicates - ase_hs.len());
    let methods = methods
        .iter()
        .map(|m| {
            let outcomes: Vec<&MethodOutcome> = records.iter().map(|r| &r.outcomes[&m.tag]).collect();
            let hs: Vec<f64> = outcomes.iter().filter_map(|o| o.h).collect();
            let rel: Vec<f64> = outcomes.iter().filter_map(|o| o.relative_error).collect();
            let errors = outcomes.iter().filter(|o| o.error.is_some()).count();
            (m.tag.clone(), MethodSummary::from_values(&hs, &rel, errors))
        })
        .collect();
    let failed_replicates = records
        .iter()
        .filter(|r| r.outcomes.values().all(|o| o.error.is_some()))
        .count();
    Ok(SectionReport {
        label: label.to_string(),
        noise: template.noise.clone(),
        replicates,
        ase,
        methods,
        failed_replicates,
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default = "default_log")]
    pub log: bool,
}

fn default_log() -> bool {
    true
}

impl GridSpec {
    pub fn build(&self) -> Result<BandwidthGrid> {
        if self.log {
            BandwidthGrid::log_spaced(self.min, self.max, self.count)
        } else {
            BandwidthGrid::linear(self.min, self.max, self.count)
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            min: 0.015,
            max: 0.25,
            count: 40,
            log: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSection {
    pub label: String,
    pub model: NoiseModel,
}

/// A complete study: one section per noise law, each running every method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyDefinition {
    pub name: String,
    pub n: usize,
    #[serde(default)]
    pub truth: TruthSpec,
    pub noises: Vec<NoiseSection>,
    pub methods: Vec<MethodSpec>,
    pub replicates: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub smoother: SmootherConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub name: String,
    pub n: usize,
    pub base_seed: u64,
    pub grid: BandwidthGrid,
    pub sections: Vec<SectionReport>,
}

pub fn run_study(def: &StudyDefinition) -> Result<StudyReport> {
    if def.noises.is_empty() {
        return Err(Error::InvalidArgument("study has no noise sections".into()));
    }
    let grid = def.grid.build()?;
    let sections = def
        .noises
        .iter()
        .map(|section| {
            let template = Scenario::new(def.truth.curve(), def.n, section.model.clone(), def.base_seed)?;
            run_section(&section.label, &template, &def.methods, &grid, &def.smoother, def.replicates, def.base_seed)
        })
        .collect::<Result<_>>()?;
    Ok(StudyReport {
        name: def.name.clone(),
        n: def.n,
        base_seed: def.base_seed,
        grid,
        sections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selectors::TrueCurve;

    fn small_template(seed: u64) -> Scenario {
        Scenario::new(TrueCurve::sine(), 64, NoiseModel::normal(0.2).unwrap(), seed).unwrap()
    }

    fn small_grid() -> BandwidthGrid {
        BandwidthGrid::log_spaced(0.02, 0.25, 12).unwrap()
    }

    #[test]
    fn bins_put_edges_low() {
        assert_eq!(bin_index(0.0), 0);
        assert_eq!(bin_index(0.1), 0);
        assert_eq!(bin_index(0.1000001), 1);
        assert_eq!(bin_index(0.2), 1);
        assert_eq!(bin_index(1.0), 5);
        assert_eq!(bin_index(2.0), 6);
        assert_eq!(bin_index(2.5), 7);
    }

    #[test]
    fn ase_method_has_zero_error_and_duplicates_agree() {
        let methods = vec![
            MethodSpec::new("ase", MethodKind::Ase),
            MethodSpec::new("a", MethodKind::Crvd),
            MethodSpec::new("b", MethodKind::Crvd),
        ];
        let rec = run_replicate(&small_template(3), &methods, &small_grid(), &SmootherConfig::default()).unwrap();
        assert_eq!(rec.outcomes["ase"].relative_error, Some(0.0));
        assert_eq!(rec.outcomes["a"], rec.outcomes["b"]);
        let dup = vec![MethodSpec::new("a", MethodKind::Crvd), MethodSpec::new("a", MethodKind::Ase)];
        assert!(run_replicate(&small_template(3), &dup, &small_grid(), &SmootherConfig::default()).is_err());
    }

    #[test]
    fn single_replicate_fills_one_bin() {
        let methods = standard_methods();
        let rep = run_section("n", &small_template(0), &methods, &small_grid(), &SmootherConfig::default(), 1, 7).unwrap();
        for summary in rep.methods.values() {
            assert_eq!(summary.bins.iter().sum::<usize>(), 1);
            assert_eq!(summary.var_h, None);
        }
        assert_eq!(rep.records[0].seed, 7);
    }

    #[test]
    fn permuting_methods_changes_nothing() {
        let methods = standard_methods();
        let mut reversed = methods.clone();
        reversed.reverse();
        let cfg = SmootherConfig::default();
        let a = run_section("n", &small_template(0), &methods, &small_grid(), &cfg, 3, 11).unwrap();
        let b = run_section("n", &small_template(0), &reversed, &small_grid(), &cfg, 3, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reports_are_reproducible() {
        let def = StudyDefinition {
            name: "tiny".into(),
            n: 40,
            truth: TruthSpec::Sine,
            noises: vec![NoiseSection {
                label: "normal".into(),
                model: NoiseModel::normal(0.2).unwrap(),
            }],
            methods: standard_methods(),
            replicates: 4,
            base_seed: 5,
            grid: GridSpec {
                min: 0.03,
                max: 0.3,
                count: 8,
                log: true,
            },
            smoother: SmootherConfig::default(),
        };
        let a = serde_json::to_string(&run_study(&def).unwrap()).unwrap();
        let b = serde_json::to_string(&run_study(&def).unwrap()).unwrap();
        assert_eq!(a, b);
        let report: StudyReport = serde_json::from_str(&a).unwrap();
        let s = &report.sections[0];
        for summary in s.methods.values() {
            let mean = summary.mean_h.unwrap();
            assert!(mean >= report.grid.min() && mean <= report.grid.max());
            assert_eq!(summary.bins.iter().sum::<usize>() + summary.errors, 4);
        }
    }

    #[test]
    fn summary_moments() {
        let s = MethodSummary::from_values(&[1.0, 2.0, 3.0], &[0.05, 0.5, 3.0], 0);
        assert_eq!(s.mean_h, Some(2.0));
        assert_eq!(s.var_h, Some(1.0));
        assert_eq!(s.bins, [1, 0, 0, 1, 0, 0, 0, 1]);
        assert_eq!(s.count_within(0.2), 1);
        assert_eq!(s.count_beyond(0.6), 1);
    }

    #[test]
    fn definition_json_round_trip() {
        let spec = MethodSpec::new("r", MethodKind::Rcrvd { rho: RhoFunction::Huber { c: 0.5 } });
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"tag":"r","kind":"rcrvd","rho":{"family":"huber","c":0.5}}"#);
        assert_eq!(serde_json::from_str::<MethodSpec>(&json).unwrap(), spec);
    }
}
