//! Zero-mean normal-mixture error distributions.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_breaks, DEFAULT_ABS_TOL};
use crate::rho::RhoFunction;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// How the spread parameter in `N(μ, s)` notation is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpreadConvention {
    #[default]
    StdDev,
    Variance,
}

impl SpreadConvention {
    pub fn to_sd(self, spread: f64) -> f64 {
        match self {
            SpreadConvention::StdDev => spread,
            SpreadConvention::Variance => spread.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseComponent {
    pub weight: f64,
    #[serde(default)]
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    components: Vec<NoiseComponent>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiExpectations {
    /// `E[ψ(ε)^2]`
    pub e_psi_sq: f64,
    /// `E[ψ'(ε)]`
    pub e_psi_prime: f64,
}

impl PsiExpectations {
    /// `E ψ² / (E ψ')²`, the noise factor of the variance term.
    pub fn scale_ratio(&self) -> f64 {
        self.e_psi_sq / (self.e_psi_prime * self.e_psi_prime)
    }
}

impl NoiseModel {
    pub fn new(components: Vec<NoiseComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("noise model needs at least one component".into()));
        }
        let mut total = 0.0;
        for c in &components {
            if !(c.weight > 0.0 && c.weight <= 1.0) {
                return Err(Error::InvalidArgument(format!("bad mixture weight {}", c.weight)));
            }
            if !(c.sd >= 0.0 && c.sd.is_finite()) {
                return Err(Error::InvalidArgument(format!("bad component sd {}", c.sd)));
            }
            if c.mean != 0.0 {
                return Err(Error::InvalidArgument("only zero-mean components are supported".into()));
            }
            total += c.weight;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(NoiseModel { components })
    }

    /// Builds a zero-mean mixture from `(weight, spread)` pairs.
    pub fn normal_mixture(parts: &[(f64, f64)], convention: SpreadConvention) -> Result<Self> {
        Self::new(
            parts
                .iter()
                .map(|&(weight, spread)| NoiseComponent {
                    weight,
                    mean: 0.0,
                    sd: convention.to_sd(spread),
                })
                .collect(),
        )
    }

    pub fn normal(sd: f64) -> Result<Self> {
        Self::normal_mixture(&[(1.0, sd)], SpreadConvention::StdDev)
    }

    pub fn components(&self) -> &[NoiseComponent] {
        &self.components
    }

    pub fn max_sd(&self) -> f64 {
        self.components.iter().map(|c| c.sd).fold(0.0, f64::max)
    }

    pub fn variance(&self) -> f64 {
        self.components.iter().map(|c| c.weight * (c.sd * c.sd + c.mean * c.mean)).sum()
    }

    /// Density of the continuous part (point masses from `sd = 0` components are excluded).
    pub fn density(&self, u: f64) -> f64 {
        self.components
            .iter()
            .filter(|c| c.sd > 0.0)
            .map(|c| {
                let z = (u - c.mean) / c.sd;
                c.weight * INV_SQRT_2PI * (-0.5 * z * z).exp() / c.sd
            })
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = self.components.last().expect("non-empty");
        for c in &self.components {
            acc += c.weight;
            if u < acc {
                chosen = c;
                break;
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        chosen.mean + chosen.sd * z
    }

    /// `E ψ(ε)^2` and `E ψ'(ε)` by adaptive quadrature over `±10` times the largest sd.
    ///
    /// For `ρ(u) = |u|` the derivative of `ψ` is the point mass `2δ(0)`, so `E ψ'`
    /// is returned as `2 f(0)`.
    pub fn psi_expectations(&self, rho: RhoFunction) -> Result<PsiExpectations> {
        let point_mass: f64 = self.components.iter().filter(|c| c.sd == 0.0).map(|c| c.weight).sum();
        let mut e_psi_sq = 0.0;
        let mut e_psi_prime = point_mass * rho.psi_prime(0.0);
        let max_sd = self.max_sd();
        if max_sd > 0.0 {
            let range = 10.0 * max_sd;
            let breaks = rho.kinks();
            e_psi_sq = integrate_with_breaks(
                |u| {
                    let p = rho.psi(u);
                    p * p * self.density(u)
                },
                -range,
                range,
                &breaks,
                DEFAULT_ABS_TOL,
            )?;
            e_psi_prime += match rho {
                RhoFunction::AbsoluteValue => 2.0 * self.density(0.0),
                _ => integrate_with_breaks(
                    |u| rho.psi_prime(u) * self.density(u),
                    -range,
                    range,
                    &breaks,
                    DEFAULT_ABS_TOL,
                )?,
            };
        } else if matches!(rho, RhoFunction::AbsoluteValue) {
            return Err(Error::InvalidArgument(
                "E psi' is undefined for |u| under a degenerate noise distribution".into(),
            ));
        }
        Ok(PsiExpectations {
            e_psi_sq,
            e_psi_prime,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn contaminated() -> NoiseModel {
        NoiseModel::normal_mixture(&[(0.9, 0.2), (0.1, 1.8)], SpreadConvention::StdDev).unwrap()
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(NoiseModel::normal_mixture(&[(0.5, 1.0), (0.4, 2.0)], SpreadConvention::StdDev).is_err());
        assert!(NoiseModel::new(vec![]).is_err());
        assert!(NoiseModel::normal(-1.0).is_err());
    }

    #[test]
    fn variance_convention() {
        let m = NoiseModel::normal_mixture(&[(1.0, 0.04)], SpreadConvention::Variance).unwrap();
        assert_abs_diff_eq!(m.components()[0].sd, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn density_is_symmetric_and_normalized() {
        let m = contaminated();
        let mass = integrate(|u| m.density(u), -18.0, 18.0, 1e-12).unwrap();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-6);
        for &u in &[0.0, 0.1, 0.7, 2.5, 9.0] {
            assert_eq!(m.density(u), m.density(-u));
        }
    }

    #[test]
    fn quadratic_expectations_are_variance_and_one() {
        let e = NoiseModel::normal(0.2).unwrap().psi_expectations(RhoFunction::Quadratic).unwrap();
        assert_abs_diff_eq!(e.e_psi_sq, 0.04, epsilon = 1e-10);
        assert_abs_diff_eq!(e.e_psi_prime, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn huber_derivative_expectation_matches_normal_cdf() {
        // Oracle: P(|ε| < 0.5) = 2Φ(2.5) − 1 for ε ~ N(0, 0.2).
        let oracle = 2.0 * Normal::new(0.0, 1.0).unwrap().cdf(2.5) - 1.0;
        assert_abs_diff_eq!(oracle, 0.98758, epsilon = 1e-5);
        let e = NoiseModel::normal(0.2)
            .unwrap()
            .psi_expectations(RhoFunction::Huber { c: 0.5 })
            .unwrap();
        assert_abs_diff_eq!(e.e_psi_prime, oracle, epsilon = 1e-9);
    }

    #[test]
    fn huber_with_huge_threshold_is_quadratic() {
        for m in [NoiseModel::normal(0.2).unwrap(), contaminated()] {
            let q = m.psi_expectations(RhoFunction::Quadratic).unwrap();
            let h = m.psi_expectations(RhoFunction::Huber { c: 1e6 }).unwrap();
            assert_abs_diff_eq!(q.e_psi_sq, h.e_psi_sq, epsilon = 1e-8);
            assert_abs_diff_eq!(q.e_psi_prime, h.e_psi_prime, epsilon = 1e-8);
        }
    }

    #[test]
    fn mixture_linearity() {
        let parts = [(0.8, 0.2), (0.2, 3.0)];
        let mix = NoiseModel::normal_mixture(&parts, SpreadConvention::StdDev).unwrap();
        for rho in [RhoFunction::Quadratic, RhoFunction::Huber { c: 0.5 }, RhoFunction::Huber { c: 1.0 }] {
            let whole = mix.psi_expectations(rho).unwrap();
            let (mut sq, mut pr) = (0.0, 0.0);
            for &(w, sd) in &parts {
                let e = NoiseModel::normal(sd).unwrap().psi_expectations(rho).unwrap();
                sq += w * e.e_psi_sq;
                pr += w * e.e_psi_prime;
            }
            assert_abs_diff_eq!(whole.e_psi_sq, sq, epsilon = 1e-10);
            assert_abs_diff_eq!(whole.e_psi_prime, pr, epsilon = 1e-10);
        }
    }

    #[test]
    fn absolute_value_expectations() {
        let e = NoiseModel::normal(0.5).unwrap().psi_expectations(RhoFunction::AbsoluteValue).unwrap();
        assert_abs_diff_eq!(e.e_psi_sq, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(e.e_psi_prime, 2.0 * INV_SQRT_2PI / 0.5, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_noise_samples_zero() {
        let m = NoiseModel::normal(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..100).all(|_| m.sample(&mut rng) == 0.0));
        let e = m.psi_expectations(RhoFunction::Huber { c: 0.5 }).unwrap();
        assert_eq!((e.e_psi_sq, e.e_psi_prime), (0.0, 1.0));
    }

    #[test]
    fn sample_variance_of_mixture() {
        let m = NoiseModel::normal_mixture(&[(0.8, 0.2), (0.2, 3.0)], SpreadConvention::StdDev).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws: Vec<f64> = (0..100_000).map(|_| m.sample(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        assert_abs_diff_eq!(m.variance(), 1.832, epsilon = 1e-12);
        assert!((var - 1.832).abs() < 0.05, "sample variance {var}");
    }
}
