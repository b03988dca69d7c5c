use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::quadrature::integrate;

type CurveFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A known regression function with its second derivative and roughness `∫₀¹ m''(x)² dx`.
#[derive(Clone)]
pub struct TrueCurve {
    name: String,
    m: CurveFn,
    m2: CurveFn,
    roughness: f64,
}

impl fmt::Debug for TrueCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrueCurve")
            .field("name", &self.name)
            .field("roughness", &self.roughness)
            .finish()
    }
}

impl TrueCurve {
    /// `m(x) = sin(2πx)`; roughness `8π⁴`.
    pub fn sine() -> Self {
        use std::f64::consts::PI;
        TrueCurve {
            name: "sine".into(),
            m: Arc::new(|x| (2.0 * PI * x).sin()),
            m2: Arc::new(|x| -4.0 * PI * PI * (2.0 * PI * x).sin()),
            roughness: 8.0 * PI.powi(4),
        }
    }

    pub fn linear(intercept: f64, slope: f64) -> Self {
        TrueCurve {
            name: format!("linear({intercept},{slope})"),
            m: Arc::new(move |x| intercept + slope * x),
            m2: Arc::new(|_| 0.0),
            roughness: 0.0,
        }
    }

    /// Arbitrary curve; roughness computed by quadrature of `m2`.
    pub fn custom<F, G>(name: impl Into<String>, m: F, m2: G) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let roughness = integrate(|x| m2(x).powi(2), 0.0, 1.0, 1e-10)?;
        Ok(TrueCurve {
            name: name.into(),
            m: Arc::new(m),
            m2: Arc::new(m2),
            roughness,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.m)(x)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        (self.m2)(x)
    }

    pub fn roughness(&self) -> f64 {
        self.roughness
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sine_roughness_matches_quadrature() {
        let t = TrueCurve::sine();
        let q = integrate(|x| t.second_derivative(x).powi(2), 0.0, 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(q, t.roughness(), epsilon = 1e-6);
        assert_abs_diff_eq!(t.roughness(), 779.272_727, epsilon = 1e-3);
    }

    #[test]
    fn custom_curve() {
        let t = TrueCurve::custom("cubic", |x| x * x * x, |x| 6.0 * x).unwrap();
        assert_abs_diff_eq!(t.roughness(), 12.0, epsilon = 1e-9);
        assert_eq!(TrueCurve::linear(1.0, 2.0).roughness(), 0.0);
    }
}
