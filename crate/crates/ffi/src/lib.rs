//! C ABI over the robust smoothing library.
//!
//! Datasets and smoother settings live behind opaque handles created and freed
//! by this library. Every fallible call returns an [`RcvStatus`]; on failure a
//! message for the calling thread is available from [`rcv_last_error_message`].
//! Output arrays are caller-allocated.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use robust_cv::kernel::Kernel;
use robust_cv::rho::RhoFunction;
use robust_cv::selectors::{self, BandwidthGrid, PlugInConfig};
use robust_cv::smoother::{self, Boundary, Dataset, SmootherConfig, WeightKind};
use robust_cv::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDataset = 3,
    /// Solver, bracketing or quadrature failure.
    Numerical = 4,
    /// Degenerate input for the plug-in rule or threshold pilot.
    Degenerate = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcvKernel {
    Gaussian = 0,
    Epanechnikov = 1,
    Uniform = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcvWeights {
    NadarayaWatson = 0,
    GasserMuller = 1,
    PriestleyChao = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcvBoundary {
    Circular = 0,
    None = 1,
}

/// Loss family; the threshold argument is used by `RCV_RHO_HUBER` only.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcvRho {
    Quadratic = 0,
    Huber = 1,
    AbsoluteValue = 2,
}

/// Opaque dataset handle.
pub struct RcvDataset {
    inner: Dataset,
}

/// Opaque smoother-settings handle.
pub struct RcvSmoother {
    inner: SmootherConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RcvStatus {
    match e.root() {
        Error::InvalidArgument(_) | Error::Config(_) | Error::Csv(_) | Error::Io(_) => RcvStatus::InvalidArgument,
        Error::InvalidDataset(_) | Error::EmptyNeighborhood { .. } => RcvStatus::InvalidDataset,
        Error::FlatCurve(_) | Error::DegeneratePilot(_) => RcvStatus::Degenerate,
        _ => RcvStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> RcvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RcvStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            RcvStatus::Panic
        }
    }
}

struct Failure(RcvStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(RcvStatus::NullPointer, format!("{name} is null"))
}

unsafe fn input<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, name: &str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

fn rho_from(family: RcvRho, c: f64) -> Result<RhoFunction, Failure> {
    Ok(match family {
        RcvRho::Quadratic => RhoFunction::Quadratic,
        RcvRho::Huber => RhoFunction::huber(c)?,
        RcvRho::AbsoluteValue => RhoFunction::AbsoluteValue,
    })
}

/// Message for the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rcv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rcv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `n` design points (strictly increasing, in `[0, 1]`) and responses.
///
/// # Safety
/// `x` and `y` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rcv_dataset_new(x: *const f64, y: *const f64, n: usize, out: *mut *mut RcvDataset) -> RcvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let data = Dataset::new(input(x, n, "x")?.to_vec(), input(y, n, "y")?.to_vec())?;
        *out = Box::into_raw(Box::new(RcvDataset { inner: data }));
        Ok(())
    })
}

/// Dataset with design `x_i = i / n` for the `n` responses.
///
/// # Safety
/// `y` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rcv_dataset_equispaced(y: *const f64, n: usize, out: *mut *mut RcvDataset) -> RcvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let data = Dataset::equispaced(input(y, n, "y")?.to_vec())?;
        *out = Box::into_raw(Box::new(RcvDataset { inner: data }));
        Ok(())
    })
}

/// # Safety
/// `data` must come from a dataset constructor and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn rcv_dataset_free(data: *mut RcvDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

/// Number of observations, or 0 for NULL.
///
/// # Safety
/// `data` must be NULL or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn rcv_dataset_len(data: *const RcvDataset) -> usize {
    data.as_ref().map_or(0, |d| d.inner.len())
}

/// Default settings: Gaussian kernel, Nadaraya–Watson weights, circular
/// boundary, Huber loss with threshold 0.5.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rcv_smoother_new(out: *mut *mut RcvSmoother) -> RcvStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(RcvSmoother {
            inner: SmootherConfig::default(),
        }));
        Ok(())
    })
}

/// # Safety
/// `smoother` must come from [`rcv_smoother_new`] and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn rcv_smoother_free(smoother: *mut RcvSmoother) {
    if !smoother.is_null() {
        drop(Box::from_raw(smoother));
    }
}

/// # Safety
/// `smoother` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rcv_smoother_set_kernel(smoother: *mut RcvSmoother, kernel: RcvKernel) -> RcvStatus {
    guard(|| {
        let s = smoother.as_mut().ok_or_else(|| null("smoother"))?;
        s.inner.kernel = match kernel {
            RcvKernel::Gaussian => Kernel::Gaussian,
            RcvKernel::Epanechnikov => Kernel::Epanechnikov,
            RcvKernel::Uniform => Kernel::Uniform,
        };
        Ok(())
    })
}

/// # Safety
/// `smoother` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rcv_smoother_set_weights(
    smoother: *mut RcvSmoother,
    weights: RcvWeights,
    boundary: RcvBoundary,
) -> RcvStatus {
    guard(|| {
        let s = smoother.as_mut().ok_or_else(|| null("smoother"))?;
        s.inner.weights.variant = match weights {
            RcvWeights::NadarayaWatson => WeightKind::NadarayaWatson,
            RcvWeights::GasserMuller => WeightKind::GasserMuller,
            RcvWeights::PriestleyChao => WeightKind::PriestleyChao,
        };
        s.inner.weights.boundary = match boundary {
            RcvBoundary::Circular => Boundary::Circular,
            RcvBoundary::None => Boundary::None,
        };
        Ok(())
    })
}

/// Loss used inside the smoother. `c` is the Huber threshold.
///
/// # Safety
/// `smoother` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rcv_smoother_set_rho(smoother: *mut RcvSmoother, family: RcvRho, c: f64) -> RcvStatus {
    guard(|| {
        let s = smoother.as_mut().ok_or_else(|| null("smoother"))?;
        s.inner.rho_tilde = rho_from(family, c)?;
        Ok(())
    })
}

/// Solver tolerance (relative to the total weight) and iteration cap.
///
/// # Safety
/// `smoother` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rcv_smoother_set_solver(smoother: *mut RcvSmoother, tol: f64, max_iter: usize) -> RcvStatus {
    guard(|| {
        let s = smoother.as_mut().ok_or_else(|| null("smoother"))?;
        let candidate = SmootherConfig {
            solve_tol: tol,
            max_iter,
            ..s.inner
        };
        candidate.validate()?;
        s.inner = candidate;
        Ok(())
    })
}

/// Robust fit at `x` with bandwidth `h`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rcv_fit_at(
    smoother: *const RcvSmoother,
    data: *const RcvDataset,
    x: f64,
    h: f64,
    out: *mut f64,
) -> RcvStatus {
    guard(|| {
        let (s, d) = (handle(smoother, "smoother")?, handle(data, "data")?);
        let dst = output(out, 1, "out")?;
        dst[0] = smoother::robust_fit_at(&s.inner, &d.inner, x, h, None)?;
        Ok(())
    })
}

/// Fit at `x` with observation `exclude` (0-based) left out.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rcv_fit_at_excluding(
    smoother: *const RcvSmoother,
    data: *const RcvDataset,
    x: f64,
    h: f64,
    exclude: usize,
    out: *mut f64,
) -> RcvStatus {
    guard(|| {
        let (s, d) = (handle(smoother, "smoother")?, handle(data, "data")?);
        if exclude >= d.inner.len() {
            return Err(Failure(RcvStatus::InvalidArgument, format!("exclude index {exclude} out of range")));
        }
        let dst = output(out, 1, "out")?;
        dst[0] = smoother::robust_fit_at(&s.inner, &d.inner, x, h, Some(exclude))?;
        Ok(())
    })
}

/// Fits at each of the `len` points of `grid`, writing `len` values to `out`.
///
/// # Safety
/// Handles must be live; `grid` and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rcv_curve(
    smoother: *const RcvSmoother,
    data: *const RcvDataset,
    grid: *const f64,
    len: usize,
    h: f64,
    out: *mut f64,
) -> RcvStatus {
    guard(|| {
        let (s, d) = (handle(smoother, "smoother")?, handle(data, "data")?);
        let g = input(grid, len, "grid")?;
        let dst = output(out, len, "out")?;
        dst.copy_from_slice(&smoother::robust_curve(&s.inner, &d.inner, g, h)?);
        Ok(())
    })
}

/// FFT-binned fit at the `nbins` points `j / nbins` (power of two, at most 1024).
/// Needs Nadaraya–Watson weights on the circular design.
///
/// # Safety
/// Handles must be live; `out` must hold `nbins` doubles.
#[no_mangle]
pub unsafe extern "C" fn rcv_curve_binned(
    smoother: *const RcvSmoother,
    data: *const RcvDataset,
    nbins: usize,
    h: f64,
    out: *mut f64,
) -> RcvStatus {
    guard(|| {
        let (s, d) = (handle(smoother, "smoother")?, handle(data, "data")?);
        let dst = output(out, nbins, "out")?;
        dst.copy_from_slice(&smoother::robust_curve_binned(&s.inner, &d.inner, nbins, h)?);
        Ok(())
    })
}

unsafe fn criterion(
    s: *const RcvSmoother,
    d: *const RcvDataset,
    rho: Option<RhoFunction>,
    bandwidths: *const f64,
    len: usize,
    values: *mut f64,
    argmin_h: *mut f64,
) -> Result<(), Failure> {
    let (s, d) = (handle(s, "smoother")?, handle(d, "data")?);
    let grid = BandwidthGrid::new(input(bandwidths, len, "bandwidths")?.to_vec())?;
    let dst = output(values, len, "values")?;
    let best = output(argmin_h, 1, "argmin_h")?;
    let curve = match rho {
        None => selectors::crvd(&s.inner, &d.inner, &grid)?,
        Some(r) => selectors::rcrvd(&s.inner, r, &d.inner, &grid)?,
    };
    dst.copy_from_slice(&curve.values);
    best[0] = curve.argmin_h;
    Ok(())
}

/// Mean squared leave-one-out residual at each of `len` strictly increasing
/// bandwidths; the minimizing bandwidth goes to `argmin_h`.
///
/// # Safety
/// Handles must be live; `bandwidths` and `values` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rcv_crvd(
    smoother: *const RcvSmoother,
    data: *const RcvDataset,
    bandwidths: *const f64,
    len: usize,
    values: *mut f64,
    argmin_h: *mut f64,
) -> RcvStatus {
    guard(|| criterion(smoother, data, None, bandwidths, len, values, argmin_h))
}

/// Mean loss of the leave-one-out residuals, with the loss given by `family`
/// and threshold `c`.
///
/// # Safety
/// As [`rcv_crvd`].
#[no_mangle]
pub unsafe extern "C" fn rcv_rcrvd(
    smoother: *const RcvSmoother,
    data: *const RcvDataset,
    family: RcvRho,
    c: f64,
    bandwidths: *const f64,
    len: usize,
    values: *mut f64,
    argmin_h: *mut f64,
) -> RcvStatus {
    guard(|| {
        let rho = rho_from(family, c)?;
        criterion(smoother, data, Some(rho), bandwidths, len, values, argmin_h)
    })
}

/// Plug-in bandwidth with pilot bandwidth `pilot_h0`, using the smoother's
/// kernel and loss. No clamping is applied.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rcv_plug_in_bandwidth(
    smoother: *const RcvSmoother,
    data: *const RcvDataset,
    pilot_h0: f64,
    out: *mut f64,
) -> RcvStatus {
    guard(|| {
        let (s, d) = (handle(smoother, "smoother")?, handle(data, "data")?);
        let dst = output(out, 1, "out")?;
        let plugin = PlugInConfig {
            kernel: s.inner.kernel,
            rho_tilde: s.inner.rho_tilde,
            ..PlugInConfig::new(pilot_h0)
        };
        dst[0] = selectors::plug_in_bandwidth(&s.inner, &d.inner, &plugin, None)?.h;
        Ok(())
    })
}

/// Difference-based noise scale `(med|Δy| / (0.6745 √2))²`.
///
/// # Safety
/// `data` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rcv_sigma_r(data: *const RcvDataset, out: *mut f64) -> RcvStatus {
    guard(|| {
        let d = handle(data, "data")?;
        let dst = output(out, 1, "out")?;
        dst[0] = selectors::sigma_r(&d.inner)?;
        Ok(())
    })
}
