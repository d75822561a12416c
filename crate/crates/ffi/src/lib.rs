//! C ABI for `nctorus`.
//!
//! Every function returns an [`NctStatus`] and writes results through out
//! pointers. Handles are opaque and owned by the caller, who releases them
//! with the matching `*_free` function. Strings returned by the library are
//! released with [`nct_string_free`]. On any status other than `Ok` and
//! `Fail`, [`nct_last_error`] describes what went wrong on this thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use nctorus::algebra::{TwistMatrix, TwistedPoly};
use nctorus::cli::{default_theta, parse_theta, run, Command, Options};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NctStatus {
    Ok = 0,
    /// A verification ran and found a counterexample.
    Fail = 1,
    /// Malformed arguments, config or algebra input.
    InputError = 2,
    NullPointer = 3,
    Panic = 4,
}

/// Twist matrix θ of a quantum torus.
pub struct NctTwist(Arc<TwistMatrix>);

/// Element of the Laurent polynomial algebra over a twist.
pub struct NctPoly(TwistedPoly);

thread_local! {
    static LAST_ERROR: RefCell<Option<String>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg.into()));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

type Failure = (NctStatus, String);

fn input(e: impl ToString) -> Failure {
    (NctStatus::InputError, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<NctStatus, Failure>) -> NctStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("panic: {msg}"));
            NctStatus::Panic
        }
    }
}

unsafe fn arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or((NctStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or((NctStatus::NullPointer, format!("{name} is null")))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err((NctStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| input(format!("{name} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    // reports and polynomial strings never contain NUL
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the last error message on this thread, or null if the last call
/// succeeded.
#[no_mangle]
pub extern "C" fn nct_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().clone().map(into_c_string).unwrap_or(ptr::null_mut()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nct_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds an `n × n` twist from its `n(n-1)/2` upper-triangle entries
/// `θ_{12}, θ_{13}, …, θ_{(n-1)n}`, given as rational strings like `"-1/3"`.
///
/// # Safety
/// `upper` must point to `count` valid C strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_twist_new(n: usize, upper: *const *const c_char, count: usize, out_twist: *mut *mut NctTwist) -> NctStatus {
    guard(|| {
        let slot = out(out_twist, "out_twist")?;
        *slot = ptr::null_mut();
        if count > 0 && upper.is_null() {
            return Err((NctStatus::NullPointer, "upper is null".into()));
        }
        let entries = (0..count).map(|i| text(*upper.add(i), "upper entry")).collect::<Result<Vec<_>, _>>()?;
        let t = TwistMatrix::from_upper_strs(n, &entries).map_err(input)?;
        *slot = Box::into_raw(Box::new(NctTwist(Arc::new(t))));
        Ok(NctStatus::Ok)
    })
}

/// # Safety
/// `t` must be null or a handle from [`nct_twist_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nct_twist_free(t: *mut NctTwist) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

fn new_poly(p: TwistedPoly) -> *mut NctPoly {
    Box::into_raw(Box::new(NctPoly(p)))
}

/// The generator `u_k`, numbered from 1. Negative `k` gives `u_{|k|}*`.
///
/// # Safety
/// `t` must be a live twist handle; `out_poly` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_poly_generator(t: *const NctTwist, k: i64, out_poly: *mut *mut NctPoly) -> NctStatus {
    guard(|| {
        let t = arg(t, "twist")?;
        let slot = out(out_poly, "out_poly")?;
        *slot = ptr::null_mut();
        let idx = k.unsigned_abs() as usize;
        if idx == 0 || idx > t.0.n() {
            return Err(input(format!("generator index {k} outside 1..={}", t.0.n())));
        }
        let u = TwistedPoly::generator(&t.0, idx - 1);
        *slot = new_poly(if k < 0 { u.star() } else { u });
        Ok(NctStatus::Ok)
    })
}

/// The unit of the algebra.
///
/// # Safety
/// `t` must be a live twist handle; `out_poly` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_poly_one(t: *const NctTwist, out_poly: *mut *mut NctPoly) -> NctStatus {
    guard(|| {
        let t = arg(t, "twist")?;
        *out(out_poly, "out_poly")? = new_poly(TwistedPoly::one(&t.0));
        Ok(NctStatus::Ok)
    })
}

unsafe fn binary(a: *const NctPoly, b: *const NctPoly, out_poly: *mut *mut NctPoly, f: fn(&TwistedPoly, &TwistedPoly) -> nctorus::Result<TwistedPoly>) -> NctStatus {
    guard(|| {
        let (a, b) = (arg(a, "a")?, arg(b, "b")?);
        let slot = out(out_poly, "out_poly")?;
        *slot = ptr::null_mut();
        *slot = new_poly(f(&a.0, &b.0).map_err(input)?);
        Ok(NctStatus::Ok)
    })
}

/// `a · b`. Both operands must share the same twist.
///
/// # Safety
/// `a` and `b` must be live poly handles; `out_poly` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_poly_mul(a: *const NctPoly, b: *const NctPoly, out_poly: *mut *mut NctPoly) -> NctStatus {
    binary(a, b, out_poly, TwistedPoly::checked_mul)
}

/// `a + b`.
///
/// # Safety
/// As for [`nct_poly_mul`].
#[no_mangle]
pub unsafe extern "C" fn nct_poly_add(a: *const NctPoly, b: *const NctPoly, out_poly: *mut *mut NctPoly) -> NctStatus {
    binary(a, b, out_poly, TwistedPoly::checked_add)
}

/// `a - b`.
///
/// # Safety
/// As for [`nct_poly_mul`].
#[no_mangle]
pub unsafe extern "C" fn nct_poly_sub(a: *const NctPoly, b: *const NctPoly, out_poly: *mut *mut NctPoly) -> NctStatus {
    binary(a, b, out_poly, TwistedPoly::checked_sub)
}

/// The adjoint `a*`.
///
/// # Safety
/// `a` must be a live poly handle; `out_poly` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_poly_star(a: *const NctPoly, out_poly: *mut *mut NctPoly) -> NctStatus {
    guard(|| {
        let a = arg(a, "a")?;
        *out(out_poly, "out_poly")? = new_poly(a.0.star());
        Ok(NctStatus::Ok)
    })
}

/// Exact equality.
///
/// # Safety
/// `a` and `b` must be live poly handles; `out_equal` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nct_poly_equal(a: *const NctPoly, b: *const NctPoly, out_equal: *mut bool) -> NctStatus {
    guard(|| {
        let (a, b) = (arg(a, "a")?, arg(b, "b")?);
        *out(out_equal, "out_equal")? = a.0 == b.0;
        Ok(NctStatus::Ok)
    })
}

/// Normal-ordered text form, e.g. `q13^-1*u1 + 2*u2^-1`.
///
/// # Safety
/// `a` must be a live poly handle; `out_str` must be writable. Free the
/// result with [`nct_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nct_poly_to_string(a: *const NctPoly, out_str: *mut *mut c_char) -> NctStatus {
    guard(|| {
        let a = arg(a, "a")?;
        *out(out_str, "out_str")? = into_c_string(a.0.to_string());
        Ok(NctStatus::Ok)
    })
}

/// # Safety
/// `p` must be null or a poly handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nct_poly_free(p: *mut NctPoly) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn options(range: i64, degree: i64, seed: u64) -> Options {
    // negative values select the command default
    Options { range: (range >= 0).then_some(range), degree: (degree >= 0).then_some(degree), seed }
}

fn finish(outcome: nctorus::cli::Outcome, slot: &mut *mut c_char) -> Result<NctStatus, Failure> {
    *slot = into_c_string(outcome.report.to_json());
    match outcome.exit_code {
        0 => Ok(NctStatus::Ok),
        1 => Ok(NctStatus::Fail),
        _ => Err(input(outcome.report.error.unwrap_or_else(|| "input error".into()))),
    }
}

/// Runs `check-factor-system`, `lift`, `lift-derivation` or `curvature` on
/// a JSON config and writes the JSON report to `out_report` (also on
/// `Fail` and `InputError`). Negative `range` or `degree` selects the
/// default.
///
/// # Safety
/// `command` and `config_json` must be valid C strings; `out_report` must
/// be writable. Free the report with [`nct_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nct_run(
    command: *const c_char,
    config_json: *const c_char,
    range: i64,
    degree: i64,
    seed: u64,
    out_report: *mut *mut c_char,
) -> NctStatus {
    guard(|| {
        let slot = out(out_report, "out_report")?;
        *slot = ptr::null_mut();
        let cmd = match text(command, "command")? {
            "check-factor-system" => Command::CheckFactorSystem,
            "lift" => Command::Lift,
            "lift-derivation" => Command::LiftDerivation,
            "curvature" => Command::Curvature,
            other => return Err(input(format!("unknown command {other:?}"))),
        };
        let config = text(config_json, "config_json")?;
        finish(run(&cmd, Some(config), &options(range, degree, seed)), slot)
    })
}

/// The worked three-torus example. `theta` is `"t12,t13,t23"` or null for
/// the default `1/4,-1/3,-1/6`.
///
/// # Safety
/// `theta` must be null or a valid C string; `out_report` must be
/// writable. Free the report with [`nct_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nct_demo_q3torus(theta: *const c_char, range: i64, out_report: *mut *mut c_char) -> NctStatus {
    guard(|| {
        let slot = out(out_report, "out_report")?;
        *slot = ptr::null_mut();
        let theta = if theta.is_null() { default_theta() } else { parse_theta(text(theta, "theta")?).map_err(input)? };
        finish(run(&Command::DemoQ3Torus { theta }, None, &options(range, -1, 0)), slot)
    })
}
