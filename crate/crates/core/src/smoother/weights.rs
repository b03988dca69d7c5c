//! Kernel weight schemes `α_i(x)`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::smoother::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// Normalized kernel weights.
    #[default]
    NadarayaWatson,
    /// Kernel mass over the cell between midpoints of neighbouring design points.
    GasserMuller,
    /// Kernel height times the gap to the previous design point.
    PriestleyChao,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `[0, 1]` is treated as a circle; distances wrap around.
    #[default]
    Circular,
    /// No boundary correction.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct WeightScheme {
    pub variant: WeightKind,
    pub boundary: Boundary,
}

impl WeightScheme {
    pub fn new(variant: WeightKind, boundary: Boundary) -> Self {
        WeightScheme { variant, boundary }
    }
}

impl Boundary {
    /// Signed displacement `x - xi`, wrapped to `[-1/2, 1/2]` for the circular design.
    #[inline]
    pub fn displacement(self, x: f64, xi: f64) -> f64 {
        let d = x - xi;
        match self {
            Boundary::Circular => d - d.round(),
            Boundary::None => d,
        }
    }
}

impl FromStr for WeightKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "nw" | "nadaraya_watson" => Ok(WeightKind::NadarayaWatson),
            "gm" | "gasser_muller" => Ok(WeightKind::GasserMuller),
            "pc" | "priestley_chao" => Ok(WeightKind::PriestleyChao),
            other => Err(Error::InvalidArgument(format!("unknown weight scheme '{other}'"))),
        }
    }
}

impl FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circular" => Ok(Boundary::Circular),
            "none" => Ok(Boundary::None),
            other => Err(Error::InvalidArgument(format!("unknown boundary mode '{other}'"))),
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightKind::NadarayaWatson => "nw",
            WeightKind::GasserMuller => "gm",
            WeightKind::PriestleyChao => "pc",
        })
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Circular => "circular",
            Boundary::None => "none",
        })
    }
}

/// `α_i(x)` for every design point of `data`.
pub fn weights_at(scheme: WeightScheme, kernel: Kernel, data: &Dataset, x: f64, h: f64) -> Result<Vec<f64>> {
    weights_excluding(scheme, kernel, data.x(), x, h, None)
}

/// Weights on the design `xs` with observation `exclude` removed. The excluded
/// index carries weight zero. Nadaraya–Watson weights are renormalized over the
/// remaining points; Gasser–Müller cells and Priestley–Chao gaps are rebuilt on
/// the reduced design.
pub fn weights_excluding(
    scheme: WeightScheme,
    kernel: Kernel,
    xs: &[f64],
    x: f64,
    h: f64,
    exclude: Option<usize>,
) -> Result<Vec<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {h}")));
    }
    if let Some(i) = exclude {
        if i >= xs.len() {
            return Err(Error::InvalidArgument(format!("exclude index {i} out of range")));
        }
    }
    let mut w = match (scheme.variant, exclude) {
        (WeightKind::NadarayaWatson, _) => {
            let mut w = raw_kernel(kernel, scheme.boundary, xs, x, h);
            if let Some(i) = exclude {
                w[i] = 0.0;
            }
            w
        }
        (_, None) => partition_weights(scheme, kernel, xs, x, h),
        (_, Some(i)) => {
            let mut reduced = xs.to_vec();
            reduced.remove(i);
            let mut w = partition_weights(scheme, kernel, &reduced, x, h);
            w.insert(i, 0.0);
            w
        }
    };
    let total: f64 = w.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::EmptyNeighborhood { x, h });
    }
    if scheme.variant == WeightKind::NadarayaWatson {
        for v in &mut w {
            *v /= total;
        }
    }
    Ok(w)
}

fn raw_kernel(kernel: Kernel, boundary: Boundary, xs: &[f64], x: f64, h: f64) -> Vec<f64> {
    xs.iter()
        .map(|&xi| kernel.eval(boundary.displacement(x, xi) / h))
        .collect()
}

fn partition_weights(scheme: WeightScheme, kernel: Kernel, xs: &[f64], x: f64, h: f64) -> Vec<f64> {
    let n = xs.len();
    let circular = scheme.boundary == Boundary::Circular;
    match scheme.variant {
        WeightKind::GasserMuller => {
            let (t0, tn) = if circular {
                let t0 = 0.5 * (xs[n - 1] - 1.0 + xs[0]);
                (t0, t0 + 1.0)
            } else {
                (0.0, 1.0)
            };
            (0..n)
                .map(|i| {
                    let a = if i == 0 { t0 } else { 0.5 * (xs[i - 1] + xs[i]) };
                    let b = if i == n - 1 { tn } else { 0.5 * (xs[i] + xs[i + 1]) };
                    cell_mass(kernel, a, b, x, h, circular)
                })
                .collect()
        }
        WeightKind::PriestleyChao => (0..n)
            .map(|i| {
                let gap = match (i, circular) {
                    (0, true) => xs[0] + 1.0 - xs[n - 1],
                    (0, false) => 0.0,
                    _ => xs[i] - xs[i - 1],
                };
                gap * kernel.eval(scheme.boundary.displacement(x, xs[i]) / h) / h
            })
            .collect(),
        WeightKind::NadarayaWatson => unreachable!("handled by raw_kernel"),
    }
}

/// `h^{-1} ∫_a^b K((u - x)/h) du`, with `u - x` wrapped onto the circle when requested.
pub(crate) fn cell_mass(kernel: Kernel, a: f64, b: f64, x: f64, h: f64, circular: bool) -> f64 {
    let mass = |lo: f64, hi: f64| kernel.cdf((hi - x) / h) - kernel.cdf((lo - x) / h);
    if !circular {
        return mass(a, b);
    }
    // Move the cell next to x, then fold whatever sticks out past x ± 1/2.
    let shift = (0.5 * (a + b) - x).round();
    let (a, b) = (a - shift, b - shift);
    let (lo, hi) = (x - 0.5, x + 0.5);
    let mut total = mass(a.max(lo), b.min(hi));
    if b > hi {
        total += mass(lo, b - 1.0);
    }
    if a < lo {
        total += mass(a + 1.0, hi);
    }
    total
}
