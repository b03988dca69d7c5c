use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing positive bandwidths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct BandwidthGrid {
    values: Vec<f64>,
}

impl BandwidthGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("bandwidth grid is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("bandwidths must be positive and finite, got {v}")));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("bandwidth grid must be strictly increasing".into()));
        }
        Ok(BandwidthGrid { values })
    }

    /// `count` points equally spaced in `log h`, endpoints included exactly.
    pub fn log_spaced(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::check_range(min, max, count)?;
        let (a, b) = (min.ln(), max.ln());
        let step = (b - a) / (count - 1) as f64;
        let mut values: Vec<f64> = (0..count).map(|k| (a + k as f64 * step).exp()).collect();
        values[0] = min;
        values[count - 1] = max;
        Self::new(values)
    }

    pub fn linear(min: f64, max: f64, count: usize) -> Result<Self> {
        Self::check_range(min, max, count)?;
        let step = (max - min) / (count - 1) as f64;
        let mut values: Vec<f64> = (0..count).map(|k| min + k as f64 * step).collect();
        values[count - 1] = max;
        Self::new(values)
    }

    /// 40 log-spaced bandwidths in `[0.015, 0.25]`, sized for `n = 257` on `[0, 1]`.
    pub fn simulation_default() -> Self {
        Self::log_spaced(0.015, 0.25, 40).expect("valid constants")
    }

    fn check_range(min: f64, max: f64, count: usize) -> Result<()> {
        if count < 2 {
            return Err(Error::InvalidArgument(format!("grid needs at least 2 points, got {count}")));
        }
        if !(min > 0.0 && min < max && max.is_finite()) {
            return Err(Error::InvalidArgument(format!("invalid grid range [{min}, {max}]")));
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty grid")
    }

    pub fn clamp(&self, h: f64) -> f64 {
        h.clamp(self.min(), self.max())
    }
}

impl TryFrom<Vec<f64>> for BandwidthGrid {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        BandwidthGrid::new(v)
    }
}

impl From<BandwidthGrid> for Vec<f64> {
    fn from(g: BandwidthGrid) -> Self {
        g.values
    }
}

/// Criterion values over a bandwidth grid and the located minimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionCurve {
    pub method_tag: String,
    pub grid: BandwidthGrid,
    pub values: Vec<f64>,
    pub argmin_index: usize,
    pub argmin_h: f64,
    pub min_value: f64,
}

impl CriterionCurve {
    pub fn new(method_tag: impl Into<String>, grid: BandwidthGrid, values: Vec<f64>) -> Result<Self> {
        let argmin_index = argmin(&values, grid.values())?;
        Ok(CriterionCurve {
            method_tag: method_tag.into(),
            argmin_h: grid.values()[argmin_index],
            min_value: values[argmin_index],
            grid,
            values,
            argmin_index,
        })
    }
}

fn argmin(values: &[f64], grid: &[f64]) -> Result<usize> {
    if values.len() != grid.len() || values.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "criterion has {} values for {} bandwidths",
            values.len(),
            grid.len()
        )));
    }
    if let Some(k) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::NanCriterion { h: grid[k] });
    }
    // Strict comparison keeps the first (smallest-h) minimizer on ties.
    let mut best = 0;
    for (k, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = k;
        }
    }
    Ok(best)
}

/// Grid arg min of `values`; ties go to the smaller bandwidth. No interpolation.
pub fn minimize_curve(values: &[f64], grid: &[f64]) -> Result<(f64, f64)> {
    let k = argmin(values, grid)?;
    Ok((grid[k], values[k]))
}
