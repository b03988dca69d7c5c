use rayon::prelude::*;

use super::grid::{BandwidthGrid, CriterionCurve};
use super::truth::TrueCurve;
use crate::error::Result;
use crate::rho::RhoFunction;
use crate::smoother::{design_fits, Dataset, SmootherConfig};

/// Leave-one-out residuals `y_i − m̃_{−i}(x_i)` and, optionally, full-data fits
/// `m̃(x_i)` for every bandwidth of a grid. Computing several criteria from one
/// table avoids refitting.
#[derive(Debug, Clone)]
pub struct CriterionTable {
    pub grid: BandwidthGrid,
    pub loo_residuals: Vec<Vec<f64>>,
    pub full_fits: Option<Vec<Vec<f64>>>,
}

/// Fits the design at each bandwidth in parallel.
pub fn loo_residual_table(
    cfg: &SmootherConfig,
    data: &Dataset,
    grid: &BandwidthGrid,
    want_full: bool,
) -> Result<CriterionTable> {
    cfg.validate()?;
    let rows: Vec<(Vec<f64>, Vec<f64>)> = grid
        .values()
        .par_iter()
        .map(|&h| {
            let fits = design_fits(cfg, data, h, want_full, true)?;
            let residuals = data.y().iter().zip(&fits.loo).map(|(y, f)| y - f).collect();
            Ok((residuals, fits.full))
        })
        .collect::<Result<_>>()?;
    let (loo_residuals, full): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok(CriterionTable {
        grid: grid.clone(),
        loo_residuals,
        full_fits: want_full.then_some(full),
    })
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

impl CriterionTable {
    /// Mean squared leave-one-out residual.
    pub fn crvd(&self) -> Result<CriterionCurve> {
        let values = self
            .loo_residuals
            .iter()
            .map(|r| mean(r.iter().map(|e| e * e), r.len()))
            .collect();
        CriterionCurve::new("crvd", self.grid.clone(), values)
    }

    /// Mean of `ρ` applied to the leave-one-out residuals.
    pub fn rcrvd(&self, rho: RhoFunction) -> Result<CriterionCurve> {
        let values = self
            .loo_residuals
            .iter()
            .map(|r| mean(r.iter().map(|&e| rho.rho(e)), r.len()))
            .collect();
        CriterionCurve::new(format!("rcrvd:{rho}"), self.grid.clone(), values)
    }

    /// Average squared error of the full-data fit against `truth` at `x`.
    /// Returns `None` when the table was built without full fits.
    pub fn ase(&self, truth: &TrueCurve, x: &[f64]) -> Option<Result<CriterionCurve>> {
        let full = self.full_fits.as_ref()?;
        let m: Vec<f64> = x.iter().map(|&xi| truth.eval(xi)).collect();
        let values = full
            .iter()
            .map(|f| mean(f.iter().zip(&m).map(|(a, b)| (a - b) * (a - b)), f.len()))
            .collect();
        Some(CriterionCurve::new("ase", self.grid.clone(), values))
    }
}

/// Classical cross-validation: mean squared leave-one-out prediction error.
pub fn crvd(cfg: &SmootherConfig, data: &Dataset, grid: &BandwidthGrid) -> Result<CriterionCurve> {
    loo_residual_table(cfg, data, grid, false)?.crvd()
}

/// Robust cross-validation: mean `ρ` of the leave-one-out prediction errors.
pub fn rcrvd(cfg: &SmootherConfig, rho: RhoFunction, data: &Dataset, grid: &BandwidthGrid) -> Result<CriterionCurve> {
    loo_residual_table(cfg, data, grid, false)?.rcrvd(rho)
}

/// Average squared error `n⁻¹ Σ (m̃(x_i) − m(x_i))²` of the full-data fit.
pub fn ase(cfg: &SmootherConfig, data: &Dataset, truth: &TrueCurve, grid: &BandwidthGrid) -> Result<CriterionCurve> {
    cfg.validate()?;
    let m: Vec<f64> = data.x().iter().map(|&xi| truth.eval(xi)).collect();
    let values = grid
        .values()
        .par_iter()
        .map(|&h| {
            let fits = design_fits(cfg, data, h, true, false)?;
            Ok(mean(fits.full.iter().zip(&m).map(|(a, b)| (a - b) * (a - b)), m.len()))
        })
        .collect::<Result<Vec<f64>>>()?;
    CriterionCurve::new("ase", grid.clone(), values)
}
