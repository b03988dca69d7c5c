//! Symmetric smoothing kernels and their moments.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// Standard normal density.
    #[default]
    Gaussian,
    /// `0.75 (1 - t^2)` on `[-1, 1]`.
    Epanechnikov,
    /// `1/2` on `[-1, 1]`.
    Uniform,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [Kernel::Gaussian, Kernel::Epanechnikov, Kernel::Uniform];

    #[inline]
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Kernel::Gaussian => INV_SQRT_2PI * (-0.5 * t * t).exp(),
            Kernel::Epanechnikov => {
                if t.abs() <= 1.0 {
                    0.75 * (1.0 - t * t)
                } else {
                    0.0
                }
            }
            Kernel::Uniform => {
                if t.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }

    /// Distribution function `∫_{-∞}^t K(u) du`.
    pub fn cdf(self, t: f64) -> f64 {
        match self {
            Kernel::Gaussian => 0.5 * statrs::function::erf::erfc(-t / std::f64::consts::SQRT_2),
            Kernel::Epanechnikov => {
                let t = t.clamp(-1.0, 1.0);
                0.5 + 0.75 * (t - t * t * t / 3.0)
            }
            Kernel::Uniform => 0.5 * (t.clamp(-1.0, 1.0) + 1.0),
        }
    }

    /// Half-width of the support, `None` for unbounded support.
    pub fn support_radius(self) -> Option<f64> {
        match self {
            Kernel::Gaussian => None,
            Kernel::Epanechnikov | Kernel::Uniform => Some(1.0),
        }
    }

    /// `∫ K(u)^2 du`.
    pub fn squared_integral(self) -> f64 {
        match self {
            Kernel::Gaussian => 1.0 / (2.0 * PI.sqrt()),
            Kernel::Epanechnikov => 0.6,
            Kernel::Uniform => 0.5,
        }
    }

    /// `∫ u^2 K(u) du`.
    pub fn second_moment(self) -> f64 {
        match self {
            Kernel::Gaussian => 1.0,
            Kernel::Epanechnikov => 0.2,
            Kernel::Uniform => 1.0 / 3.0,
        }
    }

    pub fn moments(self) -> (f64, f64) {
        (self.squared_integral(), self.second_moment())
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Gaussian => "gaussian",
            Kernel::Epanechnikov => "epanechnikov",
            Kernel::Uniform => "uniform",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(Kernel::Gaussian),
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            "uniform" | "box" => Ok(Kernel::Uniform),
            other => Err(Error::InvalidArgument(format!("unknown kernel '{other}'"))),
        }
    }
}
