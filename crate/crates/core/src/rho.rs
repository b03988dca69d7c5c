//! Loss functions `ρ` and their derivatives `ψ = ρ'`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RhoFunction {
    /// `u^2 / 2`.
    Quadratic,
    /// Quadratic inside `|u| < c`, linear with slope `c` outside.
    Huber { c: f64 },
    /// `|u|`.
    AbsoluteValue,
}

impl RhoFunction {
    pub fn huber(c: f64) -> Result<Self, Error> {
        if c > 0.0 && !c.is_nan() {
            Ok(RhoFunction::Huber { c })
        } else {
            Err(Error::InvalidArgument(format!("Huber threshold must be positive, got {c}")))
        }
    }

    #[inline]
    pub fn rho(self, u: f64) -> f64 {
        match self {
            RhoFunction::Quadratic => 0.5 * u * u,
            RhoFunction::Huber { c } => {
                let a = u.abs();
                if a < c {
                    0.5 * u * u
                } else {
                    c * a - 0.5 * c * c
                }
            }
            RhoFunction::AbsoluteValue => u.abs(),
        }
    }

    #[inline]
    pub fn psi(self, u: f64) -> f64 {
        match self {
            RhoFunction::Quadratic => u,
            RhoFunction::Huber { c } => u.clamp(-c, c),
            RhoFunction::AbsoluteValue => {
                if u > 0.0 {
                    1.0
                } else if u < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Pointwise derivative of `ψ`. Huber kinks belong to the quadratic branch;
    /// for `|u|` this is zero everywhere (the jump at 0 is not represented).
    #[inline]
    pub fn psi_prime(self, u: f64) -> f64 {
        match self {
            RhoFunction::Quadratic => 1.0,
            RhoFunction::Huber { c } => {
                if u.abs() <= c {
                    1.0
                } else {
                    0.0
                }
            }
            RhoFunction::AbsoluteValue => 0.0,
        }
    }

    /// Points where `ψ` is not differentiable.
    pub fn kinks(self) -> Vec<f64> {
        match self {
            RhoFunction::Quadratic => vec![],
            RhoFunction::Huber { c } => vec![-c, c],
            RhoFunction::AbsoluteValue => vec![0.0],
        }
    }
}

impl fmt::Display for RhoFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoFunction::Quadratic => f.write_str("l2"),
            RhoFunction::Huber { c } => write!(f, "huber:{c}"),
            RhoFunction::AbsoluteValue => f.write_str("l1"),
        }
    }
}

impl FromStr for RhoFunction {
    type Err = Error;

    /// Accepts `l2` / `quadratic`, `l1` / `abs`, and `huber:<c>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "l2" | "quadratic" => return Ok(RhoFunction::Quadratic),
            "l1" | "abs" | "absolute" => return Ok(RhoFunction::AbsoluteValue),
            _ => {}
        }
        if let Some(rest) = lower.strip_prefix("huber:") {
            let c: f64 = rest
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad Huber threshold in '{s}'")))?;
            return RhoFunction::huber(c);
        }
        Err(Error::InvalidArgument(format!("unknown rho function '{s}'")))
    }
}
