//! FFT-accelerated robust smoothing on a circular grid of `2^k` bins.
//!
//! Data are spread onto the grid with four-point Lagrange weights (the adjoint
//! of cubic interpolation), and every kernel sum `Σ_i K((g − x_i)/h) f_i` over all
//! grid points `g` becomes one circular convolution.
//!
//! The robust fit at each bin solves `Σ_i K((g − x_i)/h) ψ̃(y_i − θ) = 0`. That sum
//! is not a convolution in `θ`, so it is tabulated on a ladder of trial levels
//! `θ = l_k` (one convolution per level, shared by all bins) and the root is taken
//! from the cubic Hermite interpolant between the two levels that bracket it.
//! The walk for each bin starts at the rung holding its local weighted mean.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::rho::RhoFunction;
use crate::smoother::fit::SmootherConfig;
use crate::smoother::weights::{Boundary, WeightKind};
use crate::smoother::Dataset;

pub const MAX_BINS: usize = 1024;
const MAX_LEVELS: usize = 4096;

thread_local! {
    // Plans are cached per length by the planner.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Grid points `j / nbins`, `j = 0..nbins`.
pub fn bin_centers(nbins: usize) -> Vec<f64> {
    (0..nbins).map(|j| j as f64 / nbins as f64).collect()
}

struct CircularConvolver {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectrum: Vec<f64>,
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl CircularConvolver {
    fn new(kernel: Kernel, h: f64, m: usize) -> Self {
        let (forward, inverse) = PLANNER.with(|p| {
            let mut planner = p.borrow_mut();
            (planner.plan_fft_forward(m), planner.plan_fft_inverse(m))
        });
        let mut buf: Vec<Complex<f64>> = (0..m)
            .map(|j| {
                let d = Boundary::Circular.displacement(j as f64 / m as f64, 0.0);
                Complex::new(kernel.eval(d / h), 0.0)
            })
            .collect();
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let mut scratch = vec![Complex::new(0.0, 0.0); scratch_len];
        forward.process_with_scratch(&mut buf, &mut scratch);
        // The sampled kernel is even, so its spectrum is real.
        let spectrum = buf.iter().map(|c| c.re / m as f64).collect();
        CircularConvolver {
            forward,
            inverse,
            spectrum,
            buf,
            scratch,
        }
    }

    /// Convolves two real signals at once. `fill` bins them into the buffer as
    /// real and imaginary parts; the result comes back packed the same way.
    fn convolve_with(&mut self, fill: impl FnOnce(&mut [Complex<f64>])) -> &[Complex<f64>] {
        fill(&mut self.buf);
        self.forward.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (slot, &s) in self.buf.iter_mut().zip(&self.spectrum) {
            *slot *= s;
        }
        self.inverse.process_with_scratch(&mut self.buf, &mut self.scratch);
        &self.buf
    }
}

/// Four grid nodes and Lagrange weights for one data point.
#[derive(Clone, Copy)]
struct Stencil {
    nodes: [usize; 4],
    weights: [f64; 4],
}

impl Stencil {
    fn new(x: f64, m: usize) -> Self {
        let p = x * m as f64;
        let base = p.floor();
        let t = p - base;
        let i0 = base as i64;
        let wrap = |k: i64| k.rem_euclid(m as i64) as usize;
        Stencil {
            nodes: [wrap(i0 - 1), wrap(i0), wrap(i0 + 1), wrap(i0 + 2)],
            weights: [
                -t * (t - 1.0) * (t - 2.0) / 6.0,
                (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                -(t + 1.0) * t * (t - 2.0) / 2.0,
                (t + 1.0) * t * (t - 1.0) / 6.0,
            ],
        }
    }

}

struct Binner {
    stencils: Vec<Stencil>,
}

impl Binner {
    /// Bins the pairs `(a_i, b_i)` into `out` as `a + i b`.
    fn bin_pair(&self, out: &mut [Complex<f64>], values: impl Iterator<Item = (f64, f64)>) {
        out.fill(Complex::new(0.0, 0.0));
        for (s, (a, b)) in self.stencils.iter().zip(values) {
            for k in 0..4 {
                let slot = &mut out[s.nodes[k]];
                slot.re += s.weights[k] * a;
                slot.im += s.weights[k] * b;
            }
        }
    }
}

/// Robust smoother evaluated at [`bin_centers`]`(nbins)`.
///
/// Requires Nadaraya–Watson weights on the circular design and a power-of-two
/// `nbins` between 4 and [`MAX_BINS`].
pub fn robust_curve_binned(cfg: &SmootherConfig, data: &Dataset, nbins: usize, h: f64) -> Result<Vec<f64>> {
    if !nbins.is_power_of_two() || !(4..=MAX_BINS).contains(&nbins) {
        return Err(Error::InvalidArgument(format!(
            "nbins must be a power of two in [4, {MAX_BINS}], got {nbins}"
        )));
    }
    if cfg.weights.boundary != Boundary::Circular || cfg.weights.variant != WeightKind::NadarayaWatson {
        return Err(Error::InvalidArgument(
            "the binned smoother needs Nadaraya-Watson weights on a circular design".into(),
        ));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {h}")));
    }
    cfg.validate()?;

    let m = nbins;
    let rho = cfg.rho_tilde;
    let y = data.y();
    let binner = Binner {
        stencils: data.x().iter().map(|&x| Stencil::new(x, m)).collect(),
    };
    let mut conv = CircularConvolver::new(cfg.kernel, h, m);

    let smoothed = conv.convolve_with(|buf| binner.bin_pair(buf, y.iter().map(|&v| (v, 1.0))));
    if let Some(j) = smoothed.iter().position(|c| c.im.is_nan() || c.im <= 0.0) {
        return Err(Error::EmptyNeighborhood { x: j as f64 / m as f64, h });
    }
    let theta: Vec<f64> = smoothed.iter().map(|c| c.re / c.im).collect();
    if matches!(rho, RhoFunction::Quadratic) {
        return Ok(theta);
    }

    let y_min = y.iter().copied().fold(f64::INFINITY, f64::min);
    let y_max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if y_min == y_max {
        return Ok(vec![y_min; m]);
    }

    let spacing = match rho {
        RhoFunction::Huber { c } => 0.25 * c,
        _ => (y_max - y_min) / 64.0,
    }
    .max((y_max - y_min) / MAX_LEVELS as f64);
    let origin = y_min;
    let k_lo = -2_i64;
    let k_hi = ((y_max - y_min) / spacing).ceil() as i64 + 2;

    let mut ladder = Ladder {
        origin,
        spacing,
        rho,
        k_lo,
        levels: vec![None; (k_hi - k_lo + 1) as usize],
    };
    let mut out = vec![0.0; m];
    for j in 0..m {
        let fail = || Error::BracketFailure { x: j as f64 / m as f64 };
        let mut k = (((theta[j] - origin) / spacing).floor() as i64).clamp(k_lo, k_hi - 1);
        let (mut f_lo, mut s_lo) = ladder.at(k, j, &mut conv, &binner, y);
        while f_lo < 0.0 {
            k -= 1;
            if k < k_lo {
                return Err(fail());
            }
            (f_lo, s_lo) = ladder.at(k, j, &mut conv, &binner, y);
        }
        let (mut f_hi, mut s_hi) = ladder.at(k + 1, j, &mut conv, &binner, y);
        while f_hi > 0.0 {
            k += 1;
            if k + 1 > k_hi {
                return Err(fail());
            }
            (f_lo, s_lo) = (f_hi, s_hi);
            (f_hi, s_hi) = ladder.at(k + 1, j, &mut conv, &binner, y);
        }
        let t = hermite_root(f_lo, -s_lo * spacing, f_hi, -s_hi * spacing);
        out[j] = origin + (k as f64 + t) * spacing;
    }
    Ok(out)
}

/// Convolved `ψ̃(y − l)` and `ψ̃'(y − l)` at trial levels `l = origin + k · spacing`,
/// packed as real and imaginary parts and computed on first use.
struct Ladder {
    origin: f64,
    spacing: f64,
    rho: RhoFunction,
    k_lo: i64,
    levels: Vec<Option<Vec<Complex<f64>>>>,
}

impl Ladder {
    fn at(&mut self, k: i64, j: usize, conv: &mut CircularConvolver, binner: &Binner, y: &[f64]) -> (f64, f64) {
        let (origin, spacing, rho) = (self.origin, self.spacing, self.rho);
        let level = self.levels[(k - self.k_lo) as usize].get_or_insert_with(|| {
            let l = origin + k as f64 * spacing;
            conv.convolve_with(|buf| binner.bin_pair(buf, y.iter().map(|&v| (rho.psi(v - l), rho.psi_prime(v - l)))))
                .to_vec()
        });
        (level[j].re, level[j].im)
    }
}

/// Root in `[0, 1]` of the cubic Hermite interpolant with end values `f0 ≥ 0 ≥ f1`
/// and end slopes `d0`, `d1`. Newton steps from the secant point, with bisection
/// whenever a step leaves the bracket.
fn hermite_root(f0: f64, d0: f64, f1: f64, d1: f64) -> f64 {
    if f0 == 0.0 {
        return 0.0;
    }
    if f1 == 0.0 {
        return 1.0;
    }
    let p = |t: f64| {
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * f0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * f1 + (t3 - t2) * d1
    };
    let dp = |t: f64| {
        let t2 = t * t;
        (6.0 * t2 - 6.0 * t) * (f0 - f1) + (3.0 * t2 - 4.0 * t + 1.0) * d0 + (3.0 * t2 - 2.0 * t) * d1
    };
    let (mut a, mut b) = (0.0, 1.0);
    let mut t = f0 / (f0 - f1);
    for _ in 0..60 {
        let v = p(t);
        if v == 0.0 {
            return t;
        }
        if v > 0.0 {
            a = t;
        } else {
            b = t;
        }
        let slope = dp(t);
        let newton = t - v / slope;
        let next = if slope < 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if (next - t).abs() <= 1e-14 || b - a <= 1e-14 {
            return next;
        }
        t = next;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smoother::fit::robust_curve;
    use crate::smoother::weights::WeightScheme;
    use approx::assert_abs_diff_eq;

    fn sine_data(n: usize, seed: u64) -> Dataset {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.2).unwrap();
        let y = (1..=n)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / n as f64).sin() + noise.sample(&mut rng))
            .collect();
        Dataset::equispaced(y).unwrap()
    }

    #[test]
    fn rejects_bad_bin_counts_and_schemes() {
        let d = sine_data(30, 1);
        let cfg = SmootherConfig::default();
        assert!(robust_curve_binned(&cfg, &d, 100, 0.05).is_err());
        assert!(robust_curve_binned(&cfg, &d, 2048, 0.05).is_err());
        let none = SmootherConfig {
            weights: WeightScheme::new(WeightKind::NadarayaWatson, Boundary::None),
            ..cfg
        };
        assert!(robust_curve_binned(&none, &d, 64, 0.05).is_err());
    }

    #[test]
    fn constant_data() {
        let d = Dataset::equispaced(vec![5.0; 40]).unwrap();
        for rho in [RhoFunction::Quadratic, RhoFunction::Huber { c: 0.5 }] {
            let out = robust_curve_binned(&SmootherConfig::with_rho(rho), &d, 128, 0.05).unwrap();
            assert!(out.iter().all(|v| (v - 5.0).abs() < 1e-8));
        }
    }

    #[test]
    fn quadratic_matches_direct_weighted_means() {
        let d = sine_data(257, 4);
        let cfg = SmootherConfig::with_rho(RhoFunction::Quadratic);
        let binned = robust_curve_binned(&cfg, &d, 512, 0.05).unwrap();
        let direct = robust_curve(&cfg, &d, &bin_centers(512), 0.05).unwrap();
        let scale = direct.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (b, e) in binned.iter().zip(&direct) {
            assert!((b - e).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn huber_close_to_direct() {
        let d = sine_data(257, 9);
        let cfg = SmootherConfig::default();
        let binned = robust_curve_binned(&cfg, &d, 512, 0.05).unwrap();
        let direct = robust_curve(&cfg, &d, &bin_centers(512), 0.05).unwrap();
        let dev = binned.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 0.01, "max deviation {dev}");
    }

    #[test]
    fn huber_close_to_direct_under_contamination() {
        use rand::{Rng, SeedableRng};
        use rand_distr::{Distribution, Normal};
        let cfg = SmootherConfig::default();
        for seed in 0..6u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let share = 0.1 * (seed % 3) as f64;
            let y = (1..=257)
                .map(|i| {
                    let sd = if rng.gen::<f64>() < share { 3.0 } else { 0.2 };
                    (2.0 * std::f64::consts::PI * i as f64 / 257.0).sin() + Normal::new(0.0, sd).unwrap().sample(&mut rng)
                })
                .collect();
            let d = Dataset::equispaced(y).unwrap();
            for h in [0.02, 0.05, 0.1] {
                let binned = robust_curve_binned(&cfg, &d, 512, h).unwrap();
                let direct = robust_curve(&cfg, &d, &bin_centers(512), h).unwrap();
                let dev = binned.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(dev < 0.01, "seed {seed}, h {h}: max deviation {dev}");
            }
        }
    }

    #[test]
    fn absolute_value_loss_runs() {
        let d = sine_data(129, 2);
        let cfg = SmootherConfig::with_rho(RhoFunction::AbsoluteValue);
        let binned = robust_curve_binned(&cfg, &d, 256, 0.08).unwrap();
        let direct = robust_curve(&cfg, &d, &bin_centers(256), 0.08).unwrap();
        let dev = binned.iter().zip(&direct).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 0.1, "max deviation {dev}");
    }

    #[test]
    fn hermite_root_linear_case() {
        assert_abs_diff_eq!(hermite_root(1.0, -4.0, -3.0, -4.0), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn hermite_root_matches_bisection() {
        let cases = [(1.0, -0.5, -2.0, -6.0), (0.3, -3.0, -0.1, 0.5), (2.0, 1.0, -1.0, -1.0), (1e-9, -1.0, -1.0, -1.0)];
        for (f0, d0, f1, d1) in cases {
            let p = |t: f64| {
                let (t2, t3) = (t * t, t * t * t);
                (2.0 * t3 - 3.0 * t2 + 1.0) * f0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * f1 + (t3 - t2) * d1
            };
            let t = hermite_root(f0, d0, f1, d1);
            assert!((0.0..=1.0).contains(&t));
            assert!(p(t).abs() < 1e-10, "p({t}) = {}", p(t));
        }
    }
}
