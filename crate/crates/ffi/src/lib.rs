//! C ABI over the `lagmatch` calculator.
//!
//! Every fallible function returns an [`LmStatus`]. On failure a message is
//! kept per thread and can be read with [`lm_last_error`]. Matrices and cycles
//! are opaque handles released with their `_free` function; strings returned
//! through out-parameters are released with [`lm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lagmatch::cli::{self, parse};
use lagmatch::exterior::{Rational, SpMatrix};
use lagmatch::spinc::formal_dimension_from;
use lagmatch::tqft::{
    alexander_fibered, alexander_weighted_sum, evaluate_cycle_with_threads, MorseCycle,
};
use lagmatch::Error;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LmStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed input or invalid parameter.
    Schema = 2,
    /// Input parsed but is mathematically inconsistent.
    Inconsistent = 3,
    /// Sampling too coarse for the Conley–Zehnder routine.
    Resolution = 4,
    /// A result does not fit in 64 bits.
    Overflow = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Integral symplectic matrix.
pub struct LmSpMatrix {
    inner: SpMatrix,
}

/// Closed Morse cycle.
pub struct LmMorseCycle {
    inner: MorseCycle,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (LmStatus, String);

fn set_last_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn from_error(e: Error) -> Failure {
    let status = match e {
        Error::Overflow(_) => LmStatus::Overflow,
        _ => match e.exit_code() {
            2 => LmStatus::Schema,
            4 => LmStatus::Resolution,
            _ => LmStatus::Inconsistent,
        },
    };
    (status, e.to_string())
}

fn null(what: &str) -> Failure {
    (LmStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LmStatus {
    set_last_error(None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LmStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(Some(msg));
            status
        }
        Err(_) => {
            set_last_error(Some("internal panic".to_string()));
            LmStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (LmStatus::Schema, format!("{what} is not UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn small(x: &BigInt) -> Result<i64, Failure> {
    x.to_i64()
        .ok_or_else(|| (LmStatus::Overflow, format!("{x} does not fit in 64 bits")))
}

unsafe fn write_rational(r: &Rational, num: *mut i64, den: *mut i64) -> Result<(), Failure> {
    let (n, d) = (small(r.numer())?, small(r.denom())?);
    write(num, n, "numerator output")?;
    write(den, d, "denominator output")
}

fn string_out(s: String, out: *mut *mut c_char) -> Result<(), Failure> {
    let c =
        CString::new(s).map_err(|_| (LmStatus::Inconsistent, "report contains nul".to_string()))?;
    unsafe { write(out, c.into_raw(), "string output") }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn lm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL.
///
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn lm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a `2g x 2g` symplectic matrix from `len = 4g^2` row-major entries.
///
/// # Safety
/// `entries` must point to `len` readable `int64_t` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_spmatrix_new(
    genus: usize,
    entries: *const i64,
    len: usize,
    out: *mut *mut LmSpMatrix,
) -> LmStatus {
    guard(|| {
        if entries.is_null() && len > 0 {
            return Err(null("entries"));
        }
        let data = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(entries, len).to_vec()
        };
        let inner = SpMatrix::new(genus, data).map_err(from_error)?;
        write(out, Box::into_raw(Box::new(LmSpMatrix { inner })), "out")
    })
}

/// # Safety
/// `m` must be NULL or a handle from [`lm_spmatrix_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lm_spmatrix_free(m: *mut LmSpMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Coefficients `a_0, ..., a_g` of the symmetrized Alexander polynomial of
/// the mapping torus of `m`.
///
/// Writes the count to `out_len`; when `cap` is too small nothing else is
/// written and the status is `BufferTooSmall`.
///
/// # Safety
/// `m` must be a live handle, `out` must have room for `cap` values and
/// `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_alexander_coeffs(
    m: *const LmSpMatrix,
    out: *mut i64,
    cap: usize,
    out_len: *mut usize,
) -> LmStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        let a = alexander_fibered(&m.inner).map_err(from_error)?;
        let coeffs = std::iter::once(a.a0())
            .chain(a.higher())
            .map(small)
            .collect::<Result<Vec<_>, _>>()?;
        write(out_len, coeffs.len(), "out_len")?;
        if cap < coeffs.len() {
            return Err((
                LmStatus::BufferTooSmall,
                format!("need {} slots, got {cap}", coeffs.len()),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(coeffs.as_ptr(), out, coeffs.len());
        Ok(())
    })
}

/// Supertrace of the twist map of `m` on the `n`-point model, as `num/den`.
///
/// # Safety
/// `m` must be a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_twist_supertrace(
    m: *const LmSpMatrix,
    n: u32,
    threads: usize,
    num: *mut i64,
    den: *mut i64,
) -> LmStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        let cycle = MorseCycle::fibered(m.inner.clone(), n);
        let ev = evaluate_cycle_with_threads(&cycle, threads.max(1)).map_err(from_error)?;
        write_rational(&ev.value, num, den)
    })
}

/// `Σ_i i a_{g-1-n+i}` from the Alexander coefficients of `m`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_alexander_weighted_sum(
    m: *const LmSpMatrix,
    n: u32,
    out: *mut i64,
) -> LmStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("matrix"))?;
        let a = alexander_fibered(&m.inner).map_err(from_error)?;
        let v = alexander_weighted_sum(&a, n, m.inner.genus());
        write(out, small(&v)?, "out")
    })
}

/// `(c1^2 − 2e − 3σ) / 4`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_formal_dimension(
    c1_squared: i64,
    euler: i64,
    signature: i64,
    out: *mut i64,
) -> LmStatus {
    guard(|| {
        let d = formal_dimension_from(c1_squared, euler, signature).map_err(from_error)?;
        write(out, d, "out")
    })
}

/// Parses the `morse_cycle` section of a JSON document.
///
/// # Safety
/// `document` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_cycle_from_json(
    document: *const c_char,
    out: *mut *mut LmMorseCycle,
) -> LmStatus {
    guard(|| {
        let text = str_arg(document, "document")?;
        let inner = parse(text)
            .and_then(|d| d.morse_cycle())
            .map_err(from_error)?;
        write(out, Box::into_raw(Box::new(LmMorseCycle { inner })), "out")
    })
}

/// # Safety
/// `c` must be NULL or a handle from [`lm_cycle_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lm_cycle_free(c: *mut LmMorseCycle) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Supertrace of the cycle's monodromy as `num/den`, defined up to sign.
///
/// # Safety
/// `c` must be a live handle; `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lm_cycle_evaluate(
    c: *const LmMorseCycle,
    threads: usize,
    num: *mut i64,
    den: *mut i64,
) -> LmStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("cycle"))?;
        let ev = evaluate_cycle_with_threads(&c.inner, threads.max(1)).map_err(from_error)?;
        write_rational(&ev.value, num, den)
    })
}

/// Runs `dim`, `tqft-eval`, `cz` or `gradings` on a JSON document and
/// returns the report the command-line tool would print.
///
/// # Safety
/// `command` and `document` must be nul-terminated strings; `out` must be
/// writable. The returned string is released with [`lm_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lm_run(
    command: *const c_char,
    document: *const c_char,
    json: bool,
    threads: usize,
    out: *mut *mut c_char,
) -> LmStatus {
    guard(|| {
        let command = str_arg(command, "command")?;
        let text = str_arg(document, "document")?;
        let report = cli::run_document(command, text, threads.max(1)).map_err(from_error)?;
        string_out(report.render(json), out)
    })
}

/// Report for a built-in worked example.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lm_example(
    name: *const c_char,
    m: i64,
    n: i64,
    json: bool,
    out: *mut *mut c_char,
) -> LmStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let report = cli::commands::example(name, m, n).map_err(from_error)?;
        string_out(report.render(json), out)
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
