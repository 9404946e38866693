//! C ABI over the `gmeasure` core.
//!
//! Objects are opaque heap handles created by `*_new` functions and released
//! by the matching `*_free`. Every fallible call returns a [`GmStatus`]; the
//! message of the last failure on the calling thread is available from
//! [`gm_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use gmeasure::cli::CliError;
use gmeasure::green::{self, FourierOptions, GreenEstimate, TestFunction};
use gmeasure::kernels::{JumpKernel, KernelSpec};
use gmeasure::montecarlo::{estimate_potential_cpp, McConfig};
use gmeasure::spectral::GridSpec;

/// Result codes; the numeric values match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GmStatus {
    Ok = 0,
    Failed = 1,
    Parse = 2,
    Validation = 3,
    Precondition = 4,
    NotConverged = 5,
    NullPointer = 6,
    Panic = 7,
}

/// Opaque jump kernel.
pub struct GmKernel {
    inner: JumpKernel,
}

/// Opaque Green-measure estimate on a lattice.
pub struct GmGreenEstimate {
    inner: GreenEstimate,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn status_of(code: u8) -> GmStatus {
    match code {
        0 => GmStatus::Ok,
        2 => GmStatus::Parse,
        3 => GmStatus::Validation,
        4 => GmStatus::Precondition,
        5 => GmStatus::NotConverged,
        _ => GmStatus::Failed,
    }
}

fn fail<E: Into<CliError>>(e: E) -> GmStatus {
    let e: CliError = e.into();
    set_error(&e.message);
    status_of(e.code)
}

fn null(name: &str) -> GmStatus {
    set_error(&format!("`{name}` is a null pointer"));
    GmStatus::NullPointer
}

/// Runs `body`, converting panics into [`GmStatus::Panic`].
fn guard<F: FnOnce() -> GmStatus>(body: F) -> GmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            GmStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or point to `len` readable doubles.
unsafe fn slice<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

/// Message of the last failure on this thread (empty if none). The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `spec` (e.g. `"gauss:b=1"`), using `dim` when the spec has no
/// `dim=` entry (pass 0 to require it in the spec).
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_kernel_new(spec: *const c_char, dim: usize, out: *mut *mut GmKernel) -> GmStatus {
    guard(|| {
        if spec.is_null() {
            return null("spec");
        }
        if out.is_null() {
            return null("out");
        }
        let text = match CStr::from_ptr(spec).to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("spec is not valid UTF-8");
                return GmStatus::Parse;
            }
        };
        let parsed: KernelSpec = match text.parse() {
            Ok(p) => p,
            Err(e) => return fail(e),
        };
        match JumpKernel::from_spec(&parsed, (dim > 0).then_some(dim)) {
            Ok(k) => {
                *out = Box::into_raw(Box::new(GmKernel { inner: k }));
                GmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `kernel` must be null or a handle from [`gm_kernel_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gm_kernel_free(kernel: *mut GmKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Dimension of the kernel (0 for a null handle).
///
/// # Safety
/// `kernel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gm_kernel_dim(kernel: *const GmKernel) -> usize {
    kernel.as_ref().map_or(0, |k| k.inner.dim())
}

/// Density `a(x)`.
///
/// # Safety
/// `x` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_kernel_density(kernel: *const GmKernel, x: *const f64, len: usize, out: *mut f64) -> GmStatus {
    guard(|| {
        let Some(k) = kernel.as_ref() else { return null("kernel") };
        let Some(x) = slice(x, len) else { return null("x") };
        if out.is_null() {
            return null("out");
        }
        if len != k.inner.dim() {
            set_error(&format!("point has {len} coordinates, kernel dimension is {}", k.inner.dim()));
            return GmStatus::Validation;
        }
        *out = k.inner.density(x);
        GmStatus::Ok
    })
}

/// Closed-form `G_λ(x)` of the Gaussian kernel with parameter `b`.
///
/// # Safety
/// `x` must point to `dim` doubles; `value` and `error_bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_gauss_green_closed(
    b: f64,
    dim: usize,
    lambda: f64,
    x: *const f64,
    tol: f64,
    value: *mut f64,
    error_bound: *mut f64,
) -> GmStatus {
    guard(|| {
        let Some(x) = slice(x, dim) else { return null("x") };
        if value.is_null() || error_bound.is_null() {
            return null("value/error_bound");
        }
        match green::gauss_green_closed(b, dim, lambda, x, tol) {
            Ok(v) => {
                *value = v.value;
                *error_bound = v.error_bound;
                GmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Regular part of the Green measure by spectral inversion on an
/// `n^d` lattice of half-width `half_width`. At λ = 0 the zero mode is
/// excluded (values are defined up to a constant).
///
/// # Safety
/// `kernel` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_green_fourier(
    kernel: *const GmKernel,
    n: usize,
    half_width: f64,
    lambda: f64,
    out: *mut *mut GmGreenEstimate,
) -> GmStatus {
    guard(|| {
        let Some(k) = kernel.as_ref() else { return null("kernel") };
        if out.is_null() {
            return null("out");
        }
        let grid = match GridSpec::new(k.inner.dim(), n, half_width) {
            Ok(g) => g,
            Err(e) => return fail(e),
        };
        match green::g_regular_fourier(&k.inner, &grid, lambda, &FourierOptions::default()) {
            Ok(est) => {
                *out = Box::into_raw(Box::new(GmGreenEstimate { inner: est }));
                GmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// `G_λ(x)` from an estimate (lattice value or trigonometric interpolation).
///
/// # Safety
/// `est` must be a live handle; `x` must point to `len` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gm_green_evaluate(
    est: *const GmGreenEstimate,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> GmStatus {
    guard(|| {
        let Some(e) = est.as_ref() else { return null("est") };
        let Some(x) = slice(x, len) else { return null("x") };
        if out.is_null() {
            return null("out");
        }
        match e.inner.evaluate(x) {
            Ok(v) => {
                *out = v;
                GmStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Weight `1/(1+λ)` of the atom at the origin (NaN for a null handle).
///
/// # Safety
/// `est` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gm_green_atom_weight(est: *const GmGreenEstimate) -> f64 {
    est.as_ref().map_or(f64::NAN, |e| e.inner.atom_weight)
}

/// Whether absolute values are uncertified (zero mode excluded at λ = 0).
///
/// # Safety
/// `est` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gm_green_zero_mode_uncertain(est: *const GmGreenEstimate) -> bool {
    est.as_ref().is_some_and(|e| e.inner.zero_mode_uncertain)
}

/// # Safety
/// `est` must be null or a handle from [`gm_green_fourier`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gm_green_free(est: *mut GmGreenEstimate) {
    if !est.is_null() {
        drop(Box::from_raw(est));
    }
}

/// Monte Carlo `E^{x0} ∫₀^T e^{-λt} f(X(t)) dt` for the Gaussian bump
/// `f(y) = height·exp(-|y|²/(2 width²))` centered at the origin.
///
/// # Safety
/// `kernel` must be a live handle; `x0` must point to the kernel dimension
/// of doubles; `mean` and `stderr` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_mc_potential(
    kernel: *const GmKernel,
    f_width: f64,
    f_height: f64,
    x0: *const f64,
    lambda: f64,
    paths: u64,
    horizon: f64,
    seed: u64,
    mean: *mut f64,
    stderr: *mut f64,
) -> GmStatus {
    guard(|| {
        let Some(k) = kernel.as_ref() else { return null("kernel") };
        let d = k.inner.dim();
        let Some(x0) = slice(x0, d) else { return null("x0") };
        if mean.is_null() || stderr.is_null() {
            return null("mean/stderr");
        }
        let f = TestFunction::GaussianBump { center: vec![0.0; d], width: f_width, height: f_height };
        match estimate_potential_cpp(&k.inner, &f, x0, &McConfig::new(paths, horizon, lambda, seed)) {
            Ok(est) => {
                *mean = est.mean;
                *stderr = est.stderr;
                GmStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Clears the last error message of this thread.
#[no_mangle]
pub extern "C" fn gm_clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::default());
}
