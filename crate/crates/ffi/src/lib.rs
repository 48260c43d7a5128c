//! C ABI over `welch-core`.
//!
//! Instances are opaque [`WelchHandle`] pointers created by
//! [`welch_instance_new`] and released with [`welch_instance_free`]. Every
//! fallible call returns a [`WelchStatus`]; on failure
//! [`welch_last_error_message`] describes the error for the calling thread.
//! Strings returned by the library must be released with [`welch_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use welch_core::welch::Solutions;
use welch_core::{Error, WelchInstance};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WelchStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotPrime = 3,
    ZeroExponent = 4,
    NonUnit = 5,
    OddPrimeRequired = 6,
    TwoRequired = 7,
    NotPrimitiveRoot = 8,
    NotASolution = 9,
    TooLarge = 10,
    BufferTooSmall = 11,
    Internal = 12,
    Panic = 13,
}

/// Opaque instance `(p, e, g)`.
pub struct WelchHandle {
    inner: WelchInstance,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> WelchStatus {
    match err {
        Error::NotPrime(_) | Error::PrimeOutOfBound { .. } => WelchStatus::NotPrime,
        Error::ZeroExponent => WelchStatus::ZeroExponent,
        Error::NonUnit(_) | Error::NonUnitX(_) | Error::NonUnitBase(_) | Error::EvenG(_) | Error::EvenX(_) => {
            WelchStatus::NonUnit
        }
        Error::OddPrimeRequired => WelchStatus::OddPrimeRequired,
        Error::TwoRequired => WelchStatus::TwoRequired,
        Error::NotPrimitiveRoot => WelchStatus::NotPrimitiveRoot,
        Error::NotASolution { .. } => WelchStatus::NotASolution,
        Error::TooLarge(_) | Error::BudgetExceeded(_) => WelchStatus::TooLarge,
        Error::DomainError(_) | Error::ModulusMismatch => WelchStatus::InvalidArgument,
        Error::NotARoot | Error::SingularRoot | Error::LiftFailed(_) | Error::Inconsistent(_) => {
            WelchStatus::Internal
        }
    }
}

fn fail(status: WelchStatus, msg: &str) -> WelchStatus {
    set_error(msg);
    status
}

fn from_error(err: Error) -> WelchStatus {
    fail(status_of(&err), &err.to_string())
}

/// Runs `body`, turning panics into [`WelchStatus::Panic`].
fn guard(body: impl FnOnce() -> WelchStatus) -> WelchStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(WelchStatus::Ok) => {
            set_error("");
            WelchStatus::Ok
        }
        Ok(status) => status,
        Err(_) => fail(WelchStatus::Panic, "internal panic"),
    }
}

unsafe fn handle<'a>(h: *const WelchHandle) -> Result<&'a WelchInstance, WelchStatus> {
    if h.is_null() {
        Err(fail(WelchStatus::NullPointer, "null instance handle"))
    } else {
        Ok(&(*h).inner)
    }
}

/// Copies `items` into `out[..capacity]`, always reporting the full length.
unsafe fn write_slice<T: Copy>(items: &[T], out: *mut T, capacity: usize, out_len: *mut usize) -> WelchStatus {
    *out_len = items.len();
    if items.len() > capacity {
        return fail(
            WelchStatus::BufferTooSmall,
            &format!("need room for {} values, got {capacity}", items.len()),
        );
    }
    if !items.is_empty() {
        if out.is_null() {
            return fail(WelchStatus::NullPointer, "null output buffer");
        }
        ptr::copy_nonoverlapping(items.as_ptr(), out, items.len());
    }
    WelchStatus::Ok
}

fn new_instance(p: u64, e: u32, g: i128, out: *mut *mut WelchHandle) -> WelchStatus {
    if out.is_null() {
        return fail(WelchStatus::NullPointer, "null output pointer");
    }
    match WelchInstance::new(p, e, g) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(WelchHandle { inner })) };
            WelchStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Creates an instance for prime `p`, exponent `e >= 1` and unit `g`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn welch_instance_new(p: u64, e: u32, g: i64, out: *mut *mut WelchHandle) -> WelchStatus {
    guard(|| new_instance(p, e, i128::from(g), out))
}

/// Like [`welch_instance_new`] with `g` given as a decimal string.
///
/// # Safety
/// `g` must be a NUL-terminated string; `out` as in [`welch_instance_new`].
#[no_mangle]
pub unsafe extern "C" fn welch_instance_new_str(
    p: u64,
    e: u32,
    g: *const c_char,
    out: *mut *mut WelchHandle,
) -> WelchStatus {
    guard(|| {
        if g.is_null() {
            return fail(WelchStatus::NullPointer, "null g");
        }
        let text = CStr::from_ptr(g).to_string_lossy();
        match text.trim().parse::<i128>() {
            Ok(g) => new_instance(p, e, g, out),
            Err(_) => fail(WelchStatus::InvalidArgument, &format!("g = {text:?} is not an integer")),
        }
    })
}

/// Releases an instance. Passing NULL is a no-op.
///
/// # Safety
/// `h` must come from [`welch_instance_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn welch_instance_free(h: *mut WelchHandle) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Writes `p^e`, `m = ord_p(g)` and `ord_{p^e}(g)`. Any output pointer may be NULL.
///
/// # Safety
/// `h` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn welch_instance_orders(
    h: *const WelchHandle,
    out_pe: *mut u64,
    out_m: *mut u64,
    out_ord_pe: *mut u64,
) -> WelchStatus {
    guard(|| {
        let w = match handle(h) {
            Ok(w) => w,
            Err(s) => return s,
        };
        for (dst, v) in [(out_pe, w.pe()), (out_m, w.m()), (out_ord_pe, w.ord_pe())] {
            if !dst.is_null() {
                *dst = v;
            }
        }
        WelchStatus::Ok
    })
}

/// `f(x, c) = g^(x-1+c) - x (mod p^e)`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn welch_f(h: *const WelchHandle, x: i64, c: i64, out: *mut u64) -> WelchStatus {
    guard(|| {
        let w = match handle(h) {
            Ok(w) => w,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(WelchStatus::NullPointer, "null output pointer");
        }
        *out = w.f_value(x, c);
        WelchStatus::Ok
    })
}

/// Solutions `x` for fixed `c` over one period (`{1..m*p^e}`, or `{1..2^e}`
/// when `p = 2`). `*out_len` always receives the number of solutions; if it
/// exceeds `capacity` nothing is copied and `BufferTooSmall` is returned.
///
/// # Safety
/// `h` must be a live handle, `out_xs` writable for `capacity` values and
/// `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn welch_solve_fixed_c(
    h: *const WelchHandle,
    c: i64,
    out_xs: *mut i64,
    capacity: usize,
    out_len: *mut usize,
) -> WelchStatus {
    guard(|| {
        let w = match handle(h) {
            Ok(w) => w,
            Err(s) => return s,
        };
        if out_len.is_null() {
            return fail(WelchStatus::NullPointer, "null length pointer");
        }
        match w.fixed_c_residues(c) {
            Ok(xs) => write_slice(&xs, out_xs, capacity, out_len),
            Err(e) => from_error(e),
        }
    })
}

/// All solution pairs on the canonical grid (odd `p`), as parallel arrays.
///
/// # Safety
/// `out_x` and `out_c` must be writable for `capacity` values; `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn welch_solve_all_pairs(
    h: *const WelchHandle,
    out_x: *mut i64,
    out_c: *mut i64,
    capacity: usize,
    out_len: *mut usize,
) -> WelchStatus {
    guard(|| {
        let w = match handle(h) {
            Ok(w) => w,
            Err(s) => return s,
        };
        if out_len.is_null() {
            return fail(WelchStatus::NullPointer, "null length pointer");
        }
        let report = match w.solve_all_pairs() {
            Ok(r) => r,
            Err(e) => return from_error(e),
        };
        let Solutions::Pairs(pairs) = report.solutions else {
            return fail(WelchStatus::Internal, "expected pairs");
        };
        let xs: Vec<i64> = pairs.iter().map(|s| s.x).collect();
        let cs: Vec<i64> = pairs.iter().map(|s| s.c).collect();
        let status = write_slice(&xs, out_x, capacity, out_len);
        if status != WelchStatus::Ok {
            return status;
        }
        write_slice(&cs, out_c, capacity, out_len)
    })
}

/// Number of `c in {1..m*p^(e-1)}` with `g^(x-1+c) = x (mod p^e)`.
///
/// # Safety
/// `h` must be a live handle and `out_count` writable.
#[no_mangle]
pub unsafe extern "C" fn welch_count_c_for_fixed_x(h: *const WelchHandle, x: i64, out_count: *mut u64) -> WelchStatus {
    guard(|| {
        let w = match handle(h) {
            Ok(w) => w,
            Err(s) => return s,
        };
        if out_count.is_null() {
            return fail(WelchStatus::NullPointer, "null output pointer");
        }
        match w.count_c_for_fixed_x(x) {
            Ok(c) => {
                *out_count = c.count;
                WelchStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Splits `g = omega * one_unit (mod p^e)`.
///
/// # Safety
/// `h` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn welch_teichmuller(
    h: *const WelchHandle,
    out_omega: *mut u64,
    out_one_unit: *mut u64,
) -> WelchStatus {
    guard(|| {
        let w = match handle(h) {
            Ok(w) => w,
            Err(s) => return s,
        };
        if out_omega.is_null() || out_one_unit.is_null() {
            return fail(WelchStatus::NullPointer, "null output pointer");
        }
        let d = w.decomposition();
        match (d.omega().to_u64(), d.one_unit().to_u64()) {
            (Some(o), Some(u)) => {
                *out_omega = o;
                *out_one_unit = u;
                WelchStatus::Ok
            }
            _ => fail(WelchStatus::TooLarge, "values exceed 64 bits"),
        }
    })
}

unsafe fn write_json(json: String, out: *mut *mut c_char) -> WelchStatus {
    if out.is_null() {
        return fail(WelchStatus::NullPointer, "null output pointer");
    }
    match CString::new(json) {
        Ok(s) => {
            *out = s.into_raw();
            WelchStatus::Ok
        }
        Err(_) => fail(WelchStatus::Internal, "report contains NUL"),
    }
}

/// JSON report for fixed `c` (`{1..m*p^e}`, or `{1..2^e}` for `p = 2`).
/// Release the string with [`welch_string_free`].
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn welch_solve_fixed_c_json(h: *const WelchHandle, c: i64, out: *mut *mut c_char) -> WelchStatus {
    guard(|| {
        let w = match handle(h) {
            Ok(w) => w,
            Err(s) => return s,
        };
        let report = if w.p() == 2 { w.solve_p2(c) } else { w.solve_fixed_c(c) };
        match report {
            Ok(r) => write_json(r.to_json(), out),
            Err(e) => from_error(e),
        }
    })
}

/// JSON report of all solution pairs (odd `p`).
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn welch_solve_all_pairs_json(h: *const WelchHandle, out: *mut *mut c_char) -> WelchStatus {
    guard(|| {
        let w = match handle(h) {
            Ok(w) => w,
            Err(s) => return s,
        };
        match w.solve_all_pairs() {
            Ok(r) => write_json(r.to_json(), out),
            Err(e) => from_error(e),
        }
    })
}

/// Releases a string returned by this library. Passing NULL is a no-op.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn welch_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or "" after a success.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn welch_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn welch_status_name(status: WelchStatus) -> *const c_char {
    let s: &'static CStr = match status {
        WelchStatus::Ok => c"ok",
        WelchStatus::NullPointer => c"null pointer",
        WelchStatus::InvalidArgument => c"invalid argument",
        WelchStatus::NotPrime => c"not prime",
        WelchStatus::ZeroExponent => c"zero exponent",
        WelchStatus::NonUnit => c"not a unit",
        WelchStatus::OddPrimeRequired => c"odd prime required",
        WelchStatus::TwoRequired => c"p = 2 required",
        WelchStatus::NotPrimitiveRoot => c"not a primitive root",
        WelchStatus::NotASolution => c"not a solution",
        WelchStatus::TooLarge => c"too large",
        WelchStatus::BufferTooSmall => c"buffer too small",
        WelchStatus::Internal => c"internal error",
        WelchStatus::Panic => c"panic",
    };
    s.as_ptr()
}
