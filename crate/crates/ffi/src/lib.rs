//! C interface to `stable_stein`.
//!
//! Objects are opaque handles created by `ss_*_new` style functions and released with the
//! matching `ss_*_free`. Every fallible call returns an [`SsStatus`]; on failure the message
//! is available from [`ss_last_error`] on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stable_stein::attraction::{build_sn, pareto_preset, AttractionLaw, SnConfig};
use stable_stein::bounds::{assemble_report, BoundInputs};
use stable_stein::stable::{sample_stable, StableKernel, StableParams};
use stable_stein::stein::{SteinSolution, SteinTestFn};
use stable_stein::Error;

/// Result of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsStatus {
    Ok = 0,
    /// A parameter is outside its domain.
    InvalidArgument = 1,
    /// Quadrature or another numerical routine failed.
    NumericFailure = 2,
    /// A required pointer was null.
    NullPointer = 3,
    /// The requested amount of sampling exceeds the budget.
    BudgetExceeded = 4,
    /// An internal panic was caught.
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SsStatus {
    match e {
        Error::BudgetExceeded { .. } => SsStatus::BudgetExceeded,
        e if e.is_validation() => SsStatus::InvalidArgument,
        _ => SsStatus::NumericFailure,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SsStatus, String)>) -> SsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SsStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (SsStatus, String)>;
}

impl<T> IntoFfi<T> for stable_stein::Result<T> {
    fn ffi(self) -> Result<T, (SsStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(name: &str) -> (SsStatus, String) {
    (SsStatus::NullPointer, format!("{name} is null"))
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, (SsStatus, String)> {
    unsafe { p.as_mut() }.ok_or_else(|| null(name))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, (SsStatus, String)> {
    unsafe { p.as_ref() }.ok_or_else(|| null("handle"))
}

/// Message of the last failed call on this thread, or null if none. The pointer stays valid
/// until the next failing call on the same thread.
#[unsafe(no_mangle)]
pub extern "C" fn ss_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[unsafe(no_mangle)]
pub extern "C" fn ss_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// The stable law S_α(σ, δ).
pub struct SsStableLaw {
    params: StableParams,
    kernel: StableKernel,
}

/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_stable_new(alpha: f64, sigma: f64, delta: f64, out: *mut *mut SsStableLaw) -> SsStatus {
    guard(|| {
        let out = unsafe { out_ref(out, "out") }?;
        let params = StableParams::new(alpha, sigma, delta).ffi()?;
        let kernel = StableKernel::new(alpha, delta).ffi()?;
        *out = Box::into_raw(Box::new(SsStableLaw { params, kernel }));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`ss_stable_new`] and not have been freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_stable_free(h: *mut SsStableLaw) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_stable_density(h: *const SsStableLaw, y: f64, out: *mut f64) -> SsStatus {
    guard(|| {
        let h = unsafe { handle(h) }?;
        let s = h.params.sigma;
        *unsafe { out_ref(out, "out") }? = h.kernel.pdf(y / s).ffi()? / s;
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_stable_cdf(h: *const SsStableLaw, y: f64, out: *mut f64) -> SsStatus {
    guard(|| {
        let h = unsafe { handle(h) }?;
        *unsafe { out_ref(out, "out") }? = h.kernel.cdf(y / h.params.sigma).ffi()?;
        Ok(())
    })
}

/// E(Y - M)₊.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_stable_call(h: *const SsStableLaw, m: f64, out: *mut f64) -> SsStatus {
    guard(|| {
        let h = unsafe { handle(h) }?;
        *unsafe { out_ref(out, "out") }? = h.params.call_expectation(m).ffi()?;
        Ok(())
    })
}

/// Characteristic function at λ.
///
/// # Safety
/// `h` must be a live handle; `re` and `im` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_stable_char_fn(h: *const SsStableLaw, lambda: f64, re: *mut f64, im: *mut f64) -> SsStatus {
    guard(|| {
        let h = unsafe { handle(h) }?;
        let z = h.params.char_fn(lambda);
        *unsafe { out_ref(re, "re") }? = z.re;
        *unsafe { out_ref(im, "im") }? = z.im;
        Ok(())
    })
}

/// Writes `n` seeded draws to `buf`.
///
/// # Safety
/// `h` must be a live handle and `buf` valid for `n` writes.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_stable_sample(h: *const SsStableLaw, n: usize, seed: u64, buf: *mut f64) -> SsStatus {
    guard(|| {
        let h = unsafe { handle(h) }?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let batch = sample_stable(&h.params, n, seed).ffi()?;
        unsafe { ptr::copy_nonoverlapping(batch.values.as_ptr(), buf, n) };
        Ok(())
    })
}

/// A law in the domain of normal attraction.
pub struct SsAttractionLaw {
    law: AttractionLaw,
}

fn boxed_law(law: AttractionLaw, out: *mut *mut SsAttractionLaw) -> Result<(), (SsStatus, String)> {
    let out = unsafe { out_ref(out, "out") }?;
    *out = Box::into_raw(Box::new(SsAttractionLaw { law }));
    Ok(())
}

/// Symmetric Pareto law with index α.
///
/// # Safety
/// `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_law_pareto(alpha: f64, out: *mut *mut SsAttractionLaw) -> SsStatus {
    guard(|| boxed_law(pareto_preset(alpha).ffi()?, out))
}

/// Tails (1 ± δ)(A|x|^{-α} + b|x|^{-α-γ}).
///
/// # Safety
/// `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_law_power_tail(
    alpha: f64,
    a: f64,
    delta: f64,
    b: f64,
    gamma: f64,
    out: *mut *mut SsAttractionLaw,
) -> SsStatus {
    guard(|| boxed_law(AttractionLaw::power_tail(alpha, a, delta, b, gamma).ffi()?, out))
}

/// # Safety
/// `h` must come from a law constructor and not have been freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_law_free(h: *mut SsAttractionLaw) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// F_X(x).
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_law_cdf(h: *const SsAttractionLaw, x: f64, out: *mut f64) -> SsStatus {
    guard(|| {
        let h = unsafe { handle(h) }?;
        *unsafe { out_ref(out, "out") }? = h.law.cdf(x);
        Ok(())
    })
}

/// Writes `paths` normalized sums S_n to `buf`.
///
/// # Safety
/// `h` must be a live handle and `buf` valid for `paths` writes.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_law_sample_sn(h: *const SsAttractionLaw, n: usize, paths: usize, seed: u64, buf: *mut f64) -> SsStatus {
    guard(|| {
        let h = unsafe { handle(h) }?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let batch = build_sn(&SnConfig::new(h.law.clone(), n, paths, seed)).ffi()?;
        unsafe { ptr::copy_nonoverlapping(batch.values.as_ptr(), buf, paths) };
        Ok(())
    })
}

/// Main constants and bounds; absent values are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SsBoundSummary {
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub eta4: f64,
    pub rn: f64,
    pub c1: f64,
    pub c2m: f64,
    pub c3m: f64,
    pub uniform_bound: f64,
    pub nonuniform_bound: f64,
}

fn bound_report(law: &AttractionLaw, n: f64, m: f64) -> stable_stein::Result<stable_stein::bounds::BoundReport> {
    let m = if m.is_nan() { None } else { Some(m) };
    assemble_report(&BoundInputs::from_law(law, n, m)?)
}

/// Bounds for sample size `n` and strike `m` (NaN for none).
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_bounds(h: *const SsAttractionLaw, n: f64, m: f64, out: *mut SsBoundSummary) -> SsStatus {
    guard(|| {
        let h = unsafe { handle(h) }?;
        let r = bound_report(&h.law, n, m).ffi()?;
        *unsafe { out_ref(out, "out") }? = SsBoundSummary {
            eta1: r.eta1,
            eta2: r.eta2,
            eta3: r.eta3,
            eta4: r.eta4,
            rn: r.rn,
            c1: r.c1,
            c2m: r.c2m.unwrap_or(f64::NAN),
            c3m: r.c3m.unwrap_or(f64::NAN),
            uniform_bound: r.uniform_bound,
            nonuniform_bound: r.nonuniform_bound.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Full bound report as JSON; free with [`ss_string_free`].
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_bounds_json(h: *const SsAttractionLaw, n: f64, m: f64, out: *mut *mut c_char) -> SsStatus {
    guard(|| {
        let h = unsafe { handle(h) }?;
        let r = bound_report(&h.law, n, m).ffi()?;
        let s = serde_json::to_string(&r).map_err(|e| (SsStatus::NumericFailure, e.to_string()))?;
        *unsafe { out_ref(out, "out") }? = CString::new(s).map_err(|e| (SsStatus::NumericFailure, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Solution of the Stein equation for g(x) = (x - M)₊.
pub struct SsSteinSolution {
    sol: SteinSolution,
}

/// # Safety
/// `out` must be writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_stein_call_new(m: f64, alpha: f64, delta: f64, out: *mut *mut SsSteinSolution) -> SsStatus {
    guard(|| {
        let out = unsafe { out_ref(out, "out") }?;
        let sol = SteinSolution::new(SteinTestFn::call(m).ffi()?, alpha, delta).ffi()?;
        *out = Box::into_raw(Box::new(SsSteinSolution { sol }));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`ss_stein_call_new`] and not have been freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_stein_free(h: *mut SsSteinSolution) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Which quantity [`ss_stein_eval`] returns.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsSteinQuantity {
    F = 0,
    Fprime = 1,
    Fsecond = 2,
    /// 𝒜f(y) - y f'(y)/α - g(y) + ν(g).
    Residual = 3,
}

/// # Safety
/// `h` must be a live handle and `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_stein_eval(h: *const SsSteinSolution, what: SsSteinQuantity, y: f64, out: *mut f64) -> SsStatus {
    guard(|| {
        let s = &unsafe { handle(h) }?.sol;
        let v = match what {
            SsSteinQuantity::F => s.f(y),
            SsSteinQuantity::Fprime => s.fprime(y),
            SsSteinQuantity::Fsecond => s.fsecond(y),
            SsSteinQuantity::Residual => s.residual(y),
        }
        .ffi()?;
        *unsafe { out_ref(out, "out") }? = v;
        Ok(())
    })
}

/// ν(g) = E(Y - M)₊.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_stein_nu(h: *const SsSteinSolution, out: *mut f64) -> SsStatus {
    guard(|| {
        let s = &unsafe { handle(h) }?.sol;
        *unsafe { out_ref(out, "out") }? = s.nu_g();
        Ok(())
    })
}

/// Copies the last error message into `buf` (truncated, NUL-terminated) and returns the
/// full message length, or 0 when there is none.
///
/// # Safety
/// `buf` must be valid for `len` bytes, or null with `len` 0.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn ss_last_error_copy(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let k = bytes.len().min(len - 1);
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, k);
                *buf.add(k) = 0;
            }
        }
        bytes.len()
    })
}
