use crate::error::{Error, Result};
use crate::rho::RhoFunction;
use crate::selectors::median_in_place;
use crate::smoother::{design_fits, Dataset, SmootherConfig};

pub const HUBER_EFFICIENCY_CONSTANT: f64 = 1.345;
pub const DEFAULT_MAD_DIVISOR: f64 = 0.6745;

/// Huber threshold from residuals: `1.345 · med|res| / divisor`.
pub fn threshold_from_residuals(residuals: &[f64], divisor: f64) -> Result<f64> {
    if divisor.is_nan() || divisor <= 0.0 {
        return Err(Error::InvalidArgument(format!("MAD divisor must be positive, got {divisor}")));
    }
    if residuals.is_empty() {
        return Err(Error::DegeneratePilot("no residuals".into()));
    }
    let mut abs: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
    let med = median_in_place(&mut abs);
    if med == 0.0 {
        return Err(Error::DegeneratePilot("median absolute residual is zero".into()));
    }
    Ok(HUBER_EFFICIENCY_CONSTANT * med / divisor)
}

/// Data-driven Huber threshold from a least-squares-like pilot fit
/// (Huber with `c = 10⁶`) at bandwidth `pilot_h`.
pub fn auto_threshold(cfg: &SmootherConfig, data: &Dataset, pilot_h: f64, divisor: f64) -> Result<f64> {
    if !(pilot_h > 0.0 && pilot_h.is_finite()) {
        return Err(Error::InvalidArgument(format!("pilot bandwidth must be positive, got {pilot_h}")));
    }
    let pilot = SmootherConfig {
        rho_tilde: RhoFunction::Huber { c: 1e6 },
        ..*cfg
    };
    let fits = design_fits(&pilot, data, pilot_h, true, false)?;
    let residuals: Vec<f64> = data.y().iter().zip(&fits.full).map(|(y, f)| y - f).collect();
    threshold_from_residuals(&residuals, divisor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_residuals() {
        let c = threshold_from_residuals(&[1.0, -1.0, 1.0, -1.0], DEFAULT_MAD_DIVISOR).unwrap();
        assert_abs_diff_eq!(c, 1.994, epsilon = 5e-4);
    }

    #[test]
    fn back_solved_mad() {
        let res: Vec<f64> = (0..101).map(|i| if i % 2 == 0 { 32.1 } else { -32.1 }).collect();
        let c = threshold_from_residuals(&res, DEFAULT_MAD_DIVISOR).unwrap();
        assert_abs_diff_eq!(c, 64.0, epsilon = 0.05);
    }

    #[test]
    fn perfect_fit_is_degenerate() {
        let data = Dataset::equispaced(vec![2.0; 20]).unwrap();
        let err = auto_threshold(&SmootherConfig::default(), &data, 0.1, DEFAULT_MAD_DIVISOR).unwrap_err();
        assert!(matches!(err, Error::DegeneratePilot(_)));
    }

    #[test]
    fn pilot_is_least_squares() {
        let y: Vec<f64> = (0..40).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let data = Dataset::equispaced(y).unwrap();
        let cfg = SmootherConfig::default();
        let c = auto_threshold(&cfg, &data, 0.1, DEFAULT_MAD_DIVISOR).unwrap();
        let ls = SmootherConfig::with_rho(RhoFunction::Quadratic);
        let fits = design_fits(&ls, &data, 0.1, true, false).unwrap();
        let res: Vec<f64> = data.y().iter().zip(&fits.full).map(|(a, b)| a - b).collect();
        assert_abs_diff_eq!(c, threshold_from_residuals(&res, DEFAULT_MAD_DIVISOR).unwrap(), epsilon = 1e-8);
    }
}
