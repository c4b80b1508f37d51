//! C interface to singlab.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Every entry point returns a
//! [`SinglabStatus`]; on failure a description is available from
//! [`singlab_last_error`] on the same thread. Strings returned through
//! `char **` outputs must be released with [`singlab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use singlab::critmap::verify_jacobian_identity;
use singlab::discriminant::exact_discriminant_1d;
use singlab::kernel::parse::parse_rational;
use singlab::kernel::{Budget, Polynomial};
use singlab::milnor::{analyze_germ, miniversal_unfolding, MilnorError, Unfolding};
use singlab::morselab::{degree_invariance_scan, MorseConfig};
use singlab::semitoric::{branch_semigroup, resolve_monomial_curve, semigroup_from_generators, NumericalSemigroup, PlaneBranch, SemiError, MAX_SUBDIVISIONS};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SinglabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    NotIsolated = 4,
    Unsupported = 5,
    Rejected = 6,
    GcdNotOne = 7,
    NotABranch = 8,
    Budget = 9,
    Failed = 10,
    Panic = 11,
}

/// An analyzed germ together with its miniversal unfolding.
pub struct SinglabGerm {
    unfolding: Unfolding,
}

pub struct SinglabSemigroup {
    inner: NumericalSemigroup,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

struct Fail(SinglabStatus, String);

impl From<MilnorError> for Fail {
    fn from(e: MilnorError) -> Self {
        let status = match &e {
            MilnorError::NotIsolated => SinglabStatus::NotIsolated,
            MilnorError::Kernel(singlab::kernel::KernelError::Parse { .. }) => SinglabStatus::Parse,
            MilnorError::Kernel(singlab::kernel::KernelError::BudgetExceeded(_)) => SinglabStatus::Budget,
            _ => SinglabStatus::Failed,
        };
        Fail(status, e.to_string())
    }
}

impl From<SemiError> for Fail {
    fn from(e: SemiError) -> Self {
        let status = match &e {
            SemiError::GcdNotOne(_) => SinglabStatus::GcdNotOne,
            SemiError::NotABranch(_) => SinglabStatus::NotABranch,
            SemiError::Kernel(singlab::kernel::KernelError::Parse { .. }) | SemiError::InvalidInput(_) => SinglabStatus::Parse,
            SemiError::DimensionTooLarge(_) => SinglabStatus::Unsupported,
            SemiError::RegularizationBudget(_) => SinglabStatus::Budget,
            _ => SinglabStatus::Failed,
        };
        Fail(status, e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> SinglabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SinglabStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SinglabStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(SinglabStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(SinglabStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(SinglabStatus::NullPointer, "null output pointer".into()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(SinglabStatus::NullPointer, "null handle".into()))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next singlab call on this thread.
#[no_mangle]
pub extern "C" fn singlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from a singlab function or be null.
#[no_mangle]
pub unsafe extern "C" fn singlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and analyzes `expr`; on success `*out` owns a new handle.
///
/// # Safety
/// `expr` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn singlab_germ_analyze(expr: *const c_char, out: *mut *mut SinglabGerm) -> SinglabStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let f = Polynomial::parse_auto(text(expr)?).map_err(|e| Fail(SinglabStatus::Parse, e.to_string()))?;
        let a = analyze_germ(&f, &Budget::default())?;
        let unfolding = miniversal_unfolding(&a)?;
        *out = Box::into_raw(Box::new(SinglabGerm { unfolding }));
        Ok(())
    })
}

/// # Safety
/// `germ` must be null or a handle from [`singlab_germ_analyze`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn singlab_germ_free(germ: *mut SinglabGerm) {
    if !germ.is_null() {
        drop(Box::from_raw(germ));
    }
}

/// # Safety
/// `germ` must be a live handle and `mu` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn singlab_germ_mu(germ: *const SinglabGerm, mu: *mut usize) -> SinglabStatus {
    guard(|| {
        *out_ref(mu)? = handle(germ)?.unfolding.mu();
        Ok(())
    })
}

/// JSON record of the analysis and unfolding.
///
/// # Safety
/// `germ` must be a live handle and `json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn singlab_germ_report_json(germ: *const SinglabGerm, json: *mut *mut c_char) -> SinglabStatus {
    guard(|| {
        let out = out_ref(json)?;
        let u = &handle(germ)?.unfolding;
        let v = serde_json::json!({ "analysis": u.analysis.record(), "unfolding": u.record() });
        *out = c_string(v.to_string());
        Ok(())
    })
}

/// Sets `*holds` to whether the jacobian/hessian identity holds exactly.
///
/// # Safety
/// `germ` must be a live handle and `holds` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn singlab_germ_verify_identity(germ: *const SinglabGerm, holds: *mut bool) -> SinglabStatus {
    guard(|| {
        let out = out_ref(holds)?;
        let p = verify_jacobian_identity(&handle(germ)?.unfolding).map_err(|e| Fail(SinglabStatus::Unsupported, e.to_string()))?;
        *out = p.holds;
        Ok(())
    })
}

/// Runs a seeded degree-invariance scan with `samples` accepted samples
/// in the parameter box of radius `delta` (a rational such as `"1/2"`).
///
/// # Safety
/// `germ` must be a live handle, `delta` a NUL-terminated string and
/// `alt_sum` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn singlab_germ_degree_scan(
    germ: *const SinglabGerm,
    samples: usize,
    delta: *const c_char,
    seed: u64,
    alt_sum: *mut i64,
) -> SinglabStatus {
    guard(|| {
        let out = out_ref(alt_sum)?;
        let d = parse_rational(text(delta)?).map_err(|e| Fail(SinglabStatus::Parse, e.to_string()))?;
        let u = &handle(germ)?.unfolding;
        let r = degree_invariance_scan(u, samples, &d, seed, &MorseConfig::default()).map_err(|e| {
            let status = match e {
                singlab::morselab::MorseError::UnsupportedDimension(_) => SinglabStatus::Unsupported,
                singlab::morselab::MorseError::InsufficientAcceptance { .. } => SinglabStatus::Rejected,
                _ => SinglabStatus::Failed,
            };
            Fail(status, e.to_string())
        })?;
        *out = r.alt_sum;
        Ok(())
    })
}

/// Exact discriminant of a one-variable germ as text.
///
/// # Safety
/// `germ` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn singlab_germ_discriminant(germ: *const SinglabGerm, out: *mut *mut c_char) -> SinglabStatus {
    guard(|| {
        let out = out_ref(out)?;
        let d = exact_discriminant_1d(&handle(germ)?.unfolding).map_err(|e| Fail(SinglabStatus::Unsupported, e.to_string()))?;
        *out = c_string(d.poly.to_string());
        Ok(())
    })
}

/// # Safety
/// `gens` must point to `len` readable values and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn singlab_semigroup_new(gens: *const u64, len: usize, out: *mut *mut SinglabSemigroup) -> SinglabStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        if gens.is_null() {
            return Err(Fail(SinglabStatus::NullPointer, "null generator array".into()));
        }
        let inner = semigroup_from_generators(std::slice::from_raw_parts(gens, len))?;
        *out = Box::into_raw(Box::new(SinglabSemigroup { inner }));
        Ok(())
    })
}

/// Value semigroup of a branch given as `"x(t), y(t)"`.
///
/// # Safety
/// `branch` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn singlab_semigroup_from_branch(branch: *const c_char, out: *mut *mut SinglabSemigroup) -> SinglabStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        let b = PlaneBranch::parse(text(branch)?)?;
        let inner = branch_semigroup(&b)?;
        *out = Box::into_raw(Box::new(SinglabSemigroup { inner }));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn singlab_semigroup_free(s: *mut SinglabSemigroup) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle and `conductor` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn singlab_semigroup_conductor(s: *const SinglabSemigroup, conductor: *mut u64) -> SinglabStatus {
    guard(|| {
        *out_ref(conductor)? = handle(s)?.inner.conductor;
        Ok(())
    })
}

/// Copies up to `cap` minimal generators into `buf` and stores their
/// total number in `*len`.
///
/// # Safety
/// `buf` must have room for `cap` values (or `cap` be 0), `len` valid.
#[no_mangle]
pub unsafe extern "C" fn singlab_semigroup_generators(s: *const SinglabSemigroup, buf: *mut u64, cap: usize, len: *mut usize) -> SinglabStatus {
    guard(|| {
        let len = out_ref(len)?;
        let g = &handle(s)?.inner.minimal_generators;
        *len = g.len();
        if cap > 0 && buf.is_null() {
            return Err(Fail(SinglabStatus::NullPointer, "null buffer".into()));
        }
        for (i, &x) in g.iter().take(cap).enumerate() {
            *buf.add(i) = x;
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn singlab_semigroup_contains(s: *const SinglabSemigroup, x: u64, out: *mut bool) -> SinglabStatus {
    guard(|| {
        *out_ref(out)? = handle(s)?.inner.contains(x);
        Ok(())
    })
}

/// Resolution certificate `{cones, chart, a}` as JSON.
///
/// # Safety
/// `s` must be a live handle and `json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn singlab_semigroup_resolve_json(s: *const SinglabSemigroup, json: *mut *mut c_char) -> SinglabStatus {
    guard(|| {
        let out = out_ref(json)?;
        let c = resolve_monomial_curve(&handle(s)?.inner, MAX_SUBDIVISIONS)?;
        *out = c_string(serde_json::to_string(&c).expect("serializable"));
        Ok(())
    })
}
