//! The M-type smoother: `m̃(x)` is the zero of `Σ α_j(x) ψ̃(y_j − θ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::rho::RhoFunction;
use crate::smoother::weights::{weights_excluding, WeightScheme};
use crate::smoother::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmootherConfig {
    pub kernel: Kernel,
    pub weights: WeightScheme,
    pub rho_tilde: RhoFunction,
    pub solve_tol: f64,
    pub max_iter: usize,
}

impl Default for SmootherConfig {
    fn default() -> Self {
        SmootherConfig {
            kernel: Kernel::Gaussian,
            weights: WeightScheme::default(),
            rho_tilde: RhoFunction::Huber { c: 0.5 },
            solve_tol: 1e-10,
            max_iter: 200,
        }
    }
}

impl SmootherConfig {
    pub fn with_rho(rho_tilde: RhoFunction) -> Self {
        SmootherConfig {
            rho_tilde,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let RhoFunction::Huber { c } = self.rho_tilde {
            if c.is_nan() || c <= 0.0 {
                return Err(Error::InvalidArgument(format!("Huber threshold must be positive, got {c}")));
            }
        }
        if self.solve_tol.is_nan() || self.solve_tol <= 0.0 || self.max_iter == 0 {
            return Err(Error::InvalidArgument("solver tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }
}

/// Solves `Σ w_j ψ(y_j − θ) = 0` for `θ`.
///
/// Bisection on `[min y, max y]` (over points with positive weight), switching to
/// guarded Newton steps once the bracket is narrower than 1. Returns once
/// `|Σ w ψ| ≤ tol · Σ w`, or when the bracket can no longer be split (step-shaped `ψ`).
pub fn solve_psi_equation(rho: RhoFunction, w: &[f64], y: &[f64], tol: f64, max_iter: usize) -> Result<f64> {
    let mut total = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (&wj, &yj) in w.iter().zip(y) {
        if wj > 0.0 {
            total += wj;
            lo = lo.min(yj);
            hi = hi.max(yj);
        }
    }
    if total.is_nan() || total <= 0.0 || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::BracketFailure { x: f64::NAN });
    }
    if lo == hi {
        return Ok(lo);
    }
    let psi_sum = |theta: f64| -> f64 { w.iter().zip(y).map(|(&wj, &yj)| wj * rho.psi(yj - theta)).sum() };
    let slope_at = |theta: f64| -> f64 { w.iter().zip(y).map(|(&wj, &yj)| wj * rho.psi_prime(yj - theta)).sum() };

    if psi_sum(lo) < 0.0 || psi_sum(hi) > 0.0 {
        return Err(Error::BracketFailure { x: f64::NAN });
    }
    let target = tol * total;
    let mut theta = 0.5 * (lo + hi);
    let mut last = f64::NAN;
    // |residual| before the most recent Newton step; a step that fails to halve it
    // hands the next iteration back to bisection.
    let mut newton_from: Option<f64> = None;
    for _ in 0..max_iter {
        let g = psi_sum(theta);
        last = g / total;
        if g.abs() <= target {
            return Ok(theta);
        }
        if g > 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
        let stalled = newton_from.is_some_and(|prev| g.abs() > 0.5 * prev);
        newton_from = None;
        if hi - lo < 1.0 && !stalled {
            let slope = slope_at(theta);
            if slope > 0.0 {
                let candidate = theta + g / slope;
                if candidate > lo && candidate < hi {
                    newton_from = Some(g.abs());
                    theta = candidate;
                    continue;
                }
            }
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        theta = mid;
    }
    Err(Error::MaxIterations {
        iterations: max_iter,
        residual: last,
    })
}

/// `m̃(x)`, or the leave-one-out `m̃_{−i}(x)` when `exclude = Some(i)`.
pub fn robust_fit_at(cfg: &SmootherConfig, data: &Dataset, x: f64, h: f64, exclude: Option<usize>) -> Result<f64> {
    let w = weights_excluding(cfg.weights, cfg.kernel, data.x(), x, h, exclude)?;
    solve_psi_equation(cfg.rho_tilde, &w, data.y(), cfg.solve_tol, cfg.max_iter).map_err(|e| match e {
        Error::BracketFailure { .. } => Error::BracketFailure { x },
        other => other,
    })
}

/// [`robust_fit_at`] over a grid of evaluation points.
pub fn robust_curve(cfg: &SmootherConfig, data: &Dataset, grid: &[f64], h: f64) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("evaluation grid is empty".into()));
    }
    grid.iter()
        .enumerate()
        .map(|(index, &x)| {
            robust_fit_at(cfg, data, x, h, None).map_err(|e| Error::AtGridPoint {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Full-data fits `m̃(x_i)` and leave-one-out fits `m̃_{−i}(x_i)` at every design point.
pub struct DesignFits {
    pub full: Vec<f64>,
    pub loo: Vec<f64>,
}

/// Evaluates the smoother at each design point, with and without the point itself.
/// Errors carry `(h, i)`.
pub fn design_fits(cfg: &SmootherConfig, data: &Dataset, h: f64, want_full: bool, want_loo: bool) -> Result<DesignFits> {
    let n = data.len();
    let mut full = Vec::with_capacity(if want_full { n } else { 0 });
    let mut loo = Vec::with_capacity(if want_loo { n } else { 0 });
    let annotate = |i: usize| move |e: Error| Error::AtObservation { h, i, source: Box::new(e) };
    for (i, &xi) in data.x().iter().enumerate() {
        if want_full {
            full.push(robust_fit_at(cfg, data, xi, h, None).map_err(annotate(i))?);
        }
        if want_loo {
            loo.push(robust_fit_at(cfg, data, xi, h, Some(i)).map_err(annotate(i))?);
        }
    }
    Ok(DesignFits { full, loo })
}
