use super::truth::TrueCurve;
use crate::error::Result;
use crate::kernel::Kernel;
use crate::noise::NoiseModel;
use crate::rho::RhoFunction;

/// Leading-order mean average squared error of the robust smoother:
/// `(nh)⁻¹ R(K) Eψ²/(Eψ')² + h⁴/4 · ∫m''² · (∫u²K)²`.
pub fn mase_asymptotic(
    kernel: Kernel,
    rho_tilde: RhoFunction,
    noise: &NoiseModel,
    truth: &TrueCurve,
    n: usize,
    h: f64,
) -> Result<f64> {
    let ratio = noise.psi_expectations(rho_tilde)?.scale_ratio();
    Ok(mase_asymptotic_with(kernel, ratio, truth.roughness(), n, h))
}

/// [`mase_asymptotic`] from a precomputed `Eψ²/(Eψ')²` and roughness.
pub fn mase_asymptotic_with(kernel: Kernel, scale_ratio: f64, roughness: f64, n: usize, h: f64) -> f64 {
    let (r_k, mu2) = kernel.moments();
    r_k * scale_ratio / (n as f64 * h) + h.powi(4) / 4.0 * roughness * mu2 * mu2
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_terms_for_gaussian_sine() {
        let noise = NoiseModel::normal(0.2).unwrap();
        let rho = RhoFunction::Huber { c: 0.5 };
        let e = noise.psi_expectations(rho).unwrap();
        let h = 0.047;
        let variance = Kernel::Gaussian.squared_integral() * e.scale_ratio() / (257.0 * h);
        let bias = h.powi(4) / 4.0 * 8.0 * std::f64::consts::PI.powi(4);
        let got = mase_asymptotic(Kernel::Gaussian, rho, &noise, &TrueCurve::sine(), 257, h).unwrap();
        assert_relative_eq!(got, variance + bias, max_relative = 1e-12);
    }

    #[test]
    fn minimizer_matches_closed_form() {
        let (ratio, rough, n) = (0.04, 779.27, 257usize);
        let (r_k, mu2) = Kernel::Epanechnikov.moments();
        let closed = (r_k * ratio / (rough * mu2 * mu2 * n as f64)).powf(0.2);
        let f = |h: f64| mase_asymptotic_with(Kernel::Epanechnikov, ratio, rough, n, h);
        let (lo, hi) = (closed * 0.999, closed * 1.001);
        assert!(f(closed) < f(lo) && f(closed) < f(hi));
    }
}
