use serde::{Deserialize, Serialize};

use super::grid::BandwidthGrid;
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::rho::RhoFunction;
use crate::smoother::{robust_curve, Boundary, Dataset, SmootherConfig};

const MAD_CONSISTENCY: f64 = 0.6745;

/// Settings for the pilot fit that estimates curve roughness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlugInConfig {
    pub pilot_h0: f64,
    #[serde(default = "default_grid_size")]
    pub derivative_grid_size: usize,
    #[serde(default)]
    pub kernel: Kernel,
    #[serde(default = "default_rho")]
    pub rho_tilde: RhoFunction,
}

fn default_grid_size() -> usize {
    257
}

fn default_rho() -> RhoFunction {
    RhoFunction::Huber { c: 0.5 }
}

impl PlugInConfig {
    pub fn new(pilot_h0: f64) -> Self {
        PlugInConfig {
            pilot_h0,
            derivative_grid_size: default_grid_size(),
            kernel: Kernel::default(),
            rho_tilde: default_rho(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pilot_h0 > 0.0 && self.pilot_h0.is_finite()) {
            return Err(Error::InvalidArgument(format!("pilot bandwidth must be positive, got {}", self.pilot_h0)));
        }
        if self.derivative_grid_size < 3 {
            return Err(Error::InvalidArgument("derivative grid needs at least 3 points".into()));
        }
        Ok(())
    }
}

/// Outcome of the plug-in rule, with its ingredients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlugInSelection {
    pub h: f64,
    pub unclamped_h: f64,
    pub k: f64,
    pub sigma_r: f64,
    pub roughness: f64,
    pub warning: Option<String>,
}

/// `k = [R(K) · ratio / (roughness · μ₂²)]^{1/5}`; the optimal bandwidth is `k n^{−1/5}`.
pub fn plug_in_k(kernel: Kernel, scale_ratio: f64, roughness: f64) -> Result<f64> {
    if roughness.is_nan() || roughness <= 0.0 {
        return Err(Error::FlatCurve(roughness));
    }
    if !(scale_ratio >= 0.0 && scale_ratio.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale ratio must be nonnegative, got {scale_ratio}")));
    }
    let (r_k, mu2) = kernel.moments();
    Ok((r_k * scale_ratio / (roughness * mu2 * mu2)).powf(0.2))
}

/// Difference-based scale estimate `(med_i |y_{i+1} − y_i| / (0.6745 √2))²`.
pub fn sigma_r(data: &Dataset) -> Result<f64> {
    sigma_r_from(data.y())
}

/// [`sigma_r`] on a bare response vector.
pub fn sigma_r_from(y: &[f64]) -> Result<f64> {
    if y.len() < 2 {
        return Err(Error::InvalidArgument(format!("scale estimate needs n ≥ 2, got {}", y.len())));
    }
    let mut diffs: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let med = median_in_place(&mut diffs);
    Ok((med / (MAD_CONSISTENCY * std::f64::consts::SQRT_2)).powi(2))
}

/// Median with midpoint averaging for even lengths. Sorts `v` in place.
pub fn median_in_place(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `∫₀¹ m''(x)² dx` from a pilot robust fit at `pilot_h0` on a periodic grid,
/// using central second differences and the trapezoid rule.
pub fn roughness_estimate(cfg: &SmootherConfig, data: &Dataset, plugin: &PlugInConfig) -> Result<f64> {
    plugin.validate()?;
    let mut pilot = *cfg;
    pilot.kernel = plugin.kernel;
    pilot.rho_tilde = plugin.rho_tilde;
    pilot.weights.boundary = Boundary::Circular;
    pilot.validate()?;
    let g = plugin.derivative_grid_size;
    let grid: Vec<f64> = (0..g).map(|j| j as f64 / g as f64).collect();
    let fit = robust_curve(&pilot, data, &grid, plugin.pilot_h0)?;
    let inv_step_sq = (g * g) as f64;
    let sum: f64 = (0..g)
        .map(|j| {
            let d2 = (fit[(j + 1) % g] - 2.0 * fit[j] + fit[(j + g - 1) % g]) * inv_step_sq;
            d2 * d2
        })
        .sum();
    Ok(sum / g as f64)
}

/// Plug-in bandwidth `k n^{−1/5}` with the noise ratio replaced by [`sigma_r`].
/// When `bounds` is given the result is clamped to its range and the clamp is
/// reported in `warning`.
pub fn plug_in_bandwidth(
    cfg: &SmootherConfig,
    data: &Dataset,
    plugin: &PlugInConfig,
    bounds: Option<&BandwidthGrid>,
) -> Result<PlugInSelection> {
    let sigma = sigma_r(data)?;
    if sigma == 0.0 {
        return Err(Error::DegeneratePilot("scale estimate is exactly zero".into()));
    }
    let roughness = roughness_estimate(cfg, data, plugin)?;
    let k = plug_in_k(plugin.kernel, sigma, roughness)?;
    let unclamped_h = k * (data.len() as f64).powf(-0.2);
    let (h, warning) = match bounds {
        Some(grid) if unclamped_h < grid.min() || unclamped_h > grid.max() => {
            let h = grid.clamp(unclamped_h);
            (h, Some(format!("plug-in bandwidth {unclamped_h:e} clamped to {h}")))
        }
        _ => (unclamped_h, None),
    };
    Ok(PlugInSelection {
        h,
        unclamped_h,
        k,
        sigma_r: sigma,
        roughness,
        warning,
    })
}
