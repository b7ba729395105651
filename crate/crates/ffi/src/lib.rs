//! C ABI over `carleman_coeffs`.
//!
//! Every function returns a [`CarlemanStatus`] and writes results through out
//! pointers. On a non-OK status, `carleman_last_error_message` describes the
//! failure for the calling thread. Panics never cross the boundary; they are
//! reported as `CARLEMAN_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use carleman_coeffs::carleman::{gap_for, refinement_factor};
use carleman_coeffs::integrand::{f_closed, g_eval, h_eval};
use carleman_coeffs::quadrature::{b_quad_g, b_quad_h, lemma2_diagnostic};
use carleman_coeffs::verify::{run_verification, VerifyConfig};
use carleman_coeffs::{b_recurrence, CoefficientTable, Error, QuadratureConfig, QuadratureResult};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CarlemanStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    NotConverged = 4,
    BufferTooSmall = 5,
    Parse = 6,
    Io = 7,
    Internal = 8,
}

/// Opaque table of exact coefficients b_1..b_N.
pub struct CarlemanTable {
    inner: CoefficientTable,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CarlemanQuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub levels_used: u32,
    pub converged: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CarlemanGap {
    /// `(1 + 1/x)^x`
    pub compound: f64,
    /// `e * F_m(x)`
    pub weighted_e: f64,
    pub gap: f64,
    pub tail_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(CarlemanStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let status = match err {
            Error::OutOfRange { .. } => CarlemanStatus::OutOfRange,
            Error::NotConverged { .. } => CarlemanStatus::NotConverged,
            Error::Parse(_) => CarlemanStatus::Parse,
            Error::Io(_) => CarlemanStatus::Io,
            Error::DivisionByZero | Error::Domain { .. } | Error::Precondition(_) => {
                CarlemanStatus::InvalidArgument
            }
        };
        Failure(status, err.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CarlemanStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CarlemanStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            CarlemanStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CarlemanStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn table<'a>(p: *const CarlemanTable) -> Result<&'a CoefficientTable, Failure> {
    p.as_ref().map(|t| &t.inner).ok_or_else(|| null("table"))
}

/// `tol <= 0` selects the library default.
fn quad_config(tol: f64) -> Result<QuadratureConfig, Failure> {
    if tol > 0.0 {
        Ok(QuadratureConfig::with_tolerance(tol)?)
    } else if tol.is_nan() {
        Err(Failure(CarlemanStatus::InvalidArgument, "tolerance is NaN".into()))
    } else {
        Ok(QuadratureConfig::default())
    }
}

fn write_quad(result: carleman_coeffs::Result<QuadratureResult>, dst: &mut CarlemanQuadResult) -> Result<(), Failure> {
    match result {
        Ok(r) => {
            *dst = CarlemanQuadResult {
                value: r.value,
                error_estimate: r.error_estimate,
                levels_used: r.levels_used,
                converged: r.converged,
            };
            Ok(())
        }
        Err(Error::NotConverged { value, error_estimate }) => {
            *dst = CarlemanQuadResult { value, error_estimate, levels_used: 0, converged: false };
            Err(Error::NotConverged { value, error_estimate }.into())
        }
        Err(e) => Err(e.into()),
    }
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn carleman_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds b_1..b_max_n with the exact recurrence. Free with `carleman_table_free`.
///
/// # Safety
/// `out_table` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn carleman_table_new(max_n: usize, out_table: *mut *mut CarlemanTable) -> CarlemanStatus {
    guard(|| {
        let dst = out(out_table, "out_table")?;
        let inner = b_recurrence(max_n)?;
        *dst = Box::into_raw(Box::new(CarlemanTable { inner }));
        Ok(())
    })
}

/// # Safety
/// `table` must be null or come from `carleman_table_new`, and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn carleman_table_free(table: *mut CarlemanTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn carleman_table_len(table: *const CarlemanTable, out_len: *mut usize) -> CarlemanStatus {
    guard(|| {
        *out(out_len, "out_len")? = self::table(table)?.max_n();
        Ok(())
    })
}

/// b_n as the nearest double, 1-based.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn carleman_coefficient_f64(
    table: *const CarlemanTable,
    n: usize,
    out_value: *mut f64,
) -> CarlemanStatus {
    guard(|| {
        let dst = out(out_value, "out_value")?;
        *dst = self::table(table)?.get(n)?.to_f64();
        Ok(())
    })
}

/// b_n as a NUL-terminated "p/q" string. `out_needed` (optional) receives the
/// buffer size required including the terminator; if `capacity` is smaller,
/// nothing is written to `buf` and `BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `buf` must be valid for `capacity` bytes; other pointers null or valid.
#[no_mangle]
pub unsafe extern "C" fn carleman_coefficient_exact(
    table: *const CarlemanTable,
    n: usize,
    buf: *mut c_char,
    capacity: usize,
    out_needed: *mut usize,
) -> CarlemanStatus {
    guard(|| {
        let text = self::table(table)?.get(n)?.to_string();
        let needed = text.len() + 1;
        if let Some(dst) = out_needed.as_mut() {
            *dst = needed;
        }
        if capacity < needed {
            return Err(Failure(
                CarlemanStatus::BufferTooSmall,
                format!("need {needed} bytes, got {capacity}"),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// g(s) on [0, 1].
///
/// # Safety
/// `out_value` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn carleman_g(s: f64, out_value: *mut f64) -> CarlemanStatus {
    guard(|| {
        *out(out_value, "out_value")? = g_eval(s)?;
        Ok(())
    })
}

/// h(s) on [0, 1].
///
/// # Safety
/// `out_value` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn carleman_h(s: f64, out_value: *mut f64) -> CarlemanStatus {
    guard(|| {
        *out(out_value, "out_value")? = h_eval(s)?;
        Ok(())
    })
}

/// f(x) = (x + 1)(e - (1 + 1/x)^x) for x > 0.
///
/// # Safety
/// `out_value` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn carleman_f_closed(x: f64, out_value: *mut f64) -> CarlemanStatus {
    guard(|| {
        *out(out_value, "out_value")? = f_closed(x)?;
        Ok(())
    })
}

/// b_n (n >= 2) from the g-moment integral. On `NOT_CONVERGED` the result
/// still holds the best estimate.
///
/// # Safety
/// `out_result` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn carleman_b_quad_g(n: usize, tol: f64, out_result: *mut CarlemanQuadResult) -> CarlemanStatus {
    guard(|| {
        let dst = out(out_result, "out_result")?;
        write_quad(b_quad_g(n, &quad_config(tol)?), dst)
    })
}

/// b_n (n >= 2) from the integrated-by-parts h form.
///
/// # Safety
/// `out_result` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn carleman_b_quad_h(n: usize, tol: f64, out_result: *mut CarlemanQuadResult) -> CarlemanStatus {
    guard(|| {
        let dst = out(out_result, "out_result")?;
        write_quad(b_quad_h(n, &quad_config(tol)?), dst)
    })
}

/// n ∫ s^n h(s) ds, which tends to h(1) = -1.
///
/// # Safety
/// `out_result` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn carleman_lemma2(n: usize, tol: f64, out_result: *mut CarlemanQuadResult) -> CarlemanStatus {
    guard(|| {
        let dst = out(out_result, "out_result")?;
        write_quad(lemma2_diagnostic(n, &quad_config(tol)?), dst)
    })
}

/// F_m(x) = 1 - Σ_{k<=m} b_k/(x+1)^k and its gap against (1 + 1/x)^x.
/// Either out pointer may be null.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn carleman_refinement_factor(
    table: *const CarlemanTable,
    x: f64,
    terms: usize,
    out_factor: *mut f64,
    out_gap: *mut CarlemanGap,
) -> CarlemanStatus {
    guard(|| {
        let factor = refinement_factor(x, terms, self::table(table)?)?;
        if let Some(dst) = out_factor.as_mut() {
            *dst = factor.float_value;
        }
        if let Some(dst) = out_gap.as_mut() {
            let g = gap_for(&factor);
            *dst = CarlemanGap {
                compound: g.compound,
                weighted_e: g.weighted_e,
                gap: g.gap,
                tail_bound: g.tail_bound,
            };
        }
        Ok(())
    })
}

/// Runs the full verification suite and returns the JSON report in
/// `*out_json` (free with `carleman_string_free`). `out_exit_code` (optional)
/// receives 0 if every check passed, 1 otherwise.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn carleman_verify_json(
    max_n: usize,
    quad_max: usize,
    tol: f64,
    out_json: *mut *mut c_char,
    out_exit_code: *mut i32,
) -> CarlemanStatus {
    guard(|| {
        let dst = out(out_json, "out_json")?;
        let config = VerifyConfig::new(max_n, quad_max, tol)?;
        let table = b_recurrence(max_n)?;
        let report = run_verification(&config, &table)?;
        let json = report.to_json();
        if let Some(code) = out_exit_code.as_mut() {
            *code = report.exit_code();
        }
        *dst = CString::new(json)
            .map_err(|e| Failure(CarlemanStatus::Internal, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn carleman_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn carleman_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
