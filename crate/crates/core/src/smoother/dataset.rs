use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered design points in `[0, 1]` with their responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Dataset {
    pub const MIN_LEN: usize = 3;

    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidDataset(format!(
                "x has {} values but y has {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < Self::MIN_LEN {
            return Err(Error::InvalidDataset(format!(
                "need at least {} observations, got {}",
                Self::MIN_LEN,
                x.len()
            )));
        }
        if let Some(i) = x.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidDataset(format!("x[{i}] = {} lies outside [0, 1]", x[i])));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!("y[{i}] is not finite")));
        }
        if let Some(i) = x.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidDataset(format!(
                "x must be strictly increasing (x[{}] = {} ≥ x[{}] = {})",
                i,
                x[i],
                i + 1,
                x[i + 1]
            )));
        }
        Ok(Dataset { x, y })
    }

    /// Equispaced design `x_i = i / n`, `i = 1..n`.
    pub fn equispaced(y: Vec<f64>) -> Result<Self> {
        let n = y.len();
        let x = (1..=n).map(|i| i as f64 / n as f64).collect();
        Self::new(x, y)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Copy with every response shifted by `beta`.
    pub fn shifted(&self, beta: f64) -> Dataset {
        Dataset {
            x: self.x.clone(),
            y: self.y.iter().map(|v| v + beta).collect(),
        }
    }

    /// Copy with observation `i` removed. The result may hold fewer than
    /// [`Dataset::MIN_LEN`] points.
    pub fn without(&self, i: usize) -> Dataset {
        let mut x = self.x.clone();
        let mut y = self.y.clone();
        x.remove(i);
        y.remove(i);
        Dataset { x, y }
    }

    pub fn with_y(&self, y: Vec<f64>) -> Result<Dataset> {
        Dataset::new(self.x.clone(), y)
    }
}
