//! C interface to the domain and estimate routines.
//!
//! Handles are opaque pointers created and destroyed here; every fallible
//! call returns a status code and leaves a message for
//! `caloric_last_error` on failure. All entry points catch panics.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use caloric::domain::{make_domain, Domain, Generator};
use caloric::error::Error;
use caloric::geom::Point;
use caloric::heatball::{heat_ball_volume, heat_kernel};
use caloric::measure::{check_condition_a, dyadic_radii, parabolic_diameter};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaloricStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The domain description did not parse.
    ParseError = 3,
    /// Arguments were out of range for the routine.
    BadParams = 4,
    /// The computation ran but the checked condition failed.
    CheckFailed = 5,
    /// Internal failure (panic or unexpected error); see the last error.
    InternalError = 6,
}

/// Opaque handle to a constructed space-time domain.
pub struct CaloricDomain {
    inner: Domain,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn status_of(e: &Error) -> CaloricStatus {
    match e {
        Error::Config(_) => CaloricStatus::ParseError,
        Error::BadParams(_) | Error::BadQuery(_) => CaloricStatus::BadParams,
        _ => CaloricStatus::InternalError,
    }
}

/// Run `f` with panics converted to `InternalError`.
fn guarded(f: impl FnOnce() -> CaloricStatus) -> CaloricStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            CaloricStatus::InternalError
        }
    }
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread; copy it if you
/// need to keep it.
#[no_mangle]
pub extern "C" fn caloric_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn caloric_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build a domain from a TOML table such as
/// `kind = "half_space_slab"\nn = 1\nwidth = 2.0\nt_end = 1.0`.
/// On success writes a handle that must be released with
/// `caloric_domain_free`.
///
/// # Safety
/// `text` must point to a NUL-terminated string and `out` to a writable
/// pointer slot.
#[no_mangle]
pub unsafe extern "C" fn caloric_domain_from_toml(
    text: *const c_char,
    out: *mut *mut CaloricDomain,
) -> CaloricStatus {
    guarded(|| {
        if text.is_null() || out.is_null() {
            set_error("null argument");
            return CaloricStatus::NullArgument;
        }
        let s = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(s) => s,
            Err(_) => {
                set_error("domain description is not UTF-8");
                return CaloricStatus::InvalidUtf8;
            }
        };
        let gen: Generator = match toml::from_str(s) {
            Ok(g) => g,
            Err(e) => {
                set_error(&e.to_string());
                return CaloricStatus::ParseError;
            }
        };
        match make_domain(&gen) {
            Ok(dom) => {
                unsafe { *out = Box::into_raw(Box::new(CaloricDomain { inner: dom })) };
                CaloricStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Release a handle from `caloric_domain_from_toml`. Null is a no-op.
///
/// # Safety
/// `dom` must be a pointer returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn caloric_domain_free(dom: *mut CaloricDomain) {
    if !dom.is_null() {
        drop(unsafe { Box::from_raw(dom) });
    }
}

/// Spatial dimension of the domain, or -1 on a null handle.
///
/// # Safety
/// `dom` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn caloric_domain_dim(dom: *const CaloricDomain) -> c_int {
    if dom.is_null() {
        return -1;
    }
    unsafe { &*dom }.inner.n as c_int
}

fn read_point(dom: &Domain, x: *const f64, t: f64) -> Point {
    let mut p = Point { x: [0.0; 3], t };
    for i in 0..dom.n {
        p.x[i] = unsafe { *x.add(i) };
    }
    p
}

/// 1 if the point `(x[0..dim], t)` lies in the open domain, 0 if not,
/// -1 on a null argument.
///
/// # Safety
/// `x` must point to at least `caloric_domain_dim(dom)` doubles.
#[no_mangle]
pub unsafe extern "C" fn caloric_domain_contains(
    dom: *const CaloricDomain,
    x: *const f64,
    t: f64,
) -> c_int {
    if dom.is_null() || x.is_null() {
        return -1;
    }
    let d = &unsafe { &*dom }.inner;
    c_int::from(d.inside(&read_point(d, x, t)))
}

/// Parabolic distance from the point to the domain complement, written to
/// `out`.
///
/// # Safety
/// `x` must point to at least `caloric_domain_dim(dom)` doubles and `out`
/// to a writable double.
#[no_mangle]
pub unsafe extern "C" fn caloric_domain_boundary_distance(
    dom: *const CaloricDomain,
    x: *const f64,
    t: f64,
    out: *mut f64,
) -> CaloricStatus {
    guarded(|| {
        if dom.is_null() || x.is_null() || out.is_null() {
            set_error("null argument");
            return CaloricStatus::NullArgument;
        }
        let d = &unsafe { &*dom }.inner;
        unsafe { *out = d.boundary_distance(&read_point(d, x, t)) };
        CaloricStatus::Ok
    })
}

/// Sampled exterior-measure density over boundary cylinders: writes the
/// observed density floor theta0_hat to `out_theta0`. Returns `Ok` when
/// every sampled cylinder shows density above `theta_floor`, `CheckFailed`
/// (with theta0_hat still written) when some cylinder falls below it.
///
/// # Safety
/// `dom` must be a live handle and `out_theta0` writable.
#[no_mangle]
pub unsafe extern "C" fn caloric_check_condition_a(
    dom: *const CaloricDomain,
    boundary_samples: usize,
    samples: usize,
    theta_floor: f64,
    seed: u64,
    out_theta0: *mut f64,
) -> CaloricStatus {
    guarded(|| {
        if dom.is_null() || out_theta0.is_null() {
            set_error("null argument");
            return CaloricStatus::NullArgument;
        }
        let d = &unsafe { &*dom }.inner;
        let radii = dyadic_radii(parabolic_diameter(d), 4);
        match check_condition_a(d, boundary_samples, &radii, samples, theta_floor, seed) {
            Ok(rep) => {
                unsafe { *out_theta0 = rep.theta0_hat };
                if rep.pass {
                    CaloricStatus::Ok
                } else {
                    set_error("exterior density fell below the requested floor");
                    CaloricStatus::CheckFailed
                }
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Volume of the heat ball of level `r` in dimension `n` (1..=3), written
/// to `out`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn caloric_heat_ball_volume(
    n: usize,
    r: f64,
    out: *mut f64,
) -> CaloricStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null argument");
            return CaloricStatus::NullArgument;
        }
        match heat_ball_volume(n, r) {
            Ok(v) => {
                unsafe { *out = v };
                CaloricStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Gauss-Weierstrass kernel evaluated at displacement `(x[0..n], t)`,
/// written to `out`; zero for t <= 0.
///
/// # Safety
/// `x` must point to `n` doubles and `out` to a writable double.
#[no_mangle]
pub unsafe extern "C" fn caloric_heat_kernel(
    x: *const f64,
    n: usize,
    t: f64,
    out: *mut f64,
) -> CaloricStatus {
    guarded(|| {
        if x.is_null() || out.is_null() {
            set_error("null argument");
            return CaloricStatus::NullArgument;
        }
        if !(1..=3).contains(&n) {
            set_error("dimension must be 1, 2, or 3");
            return CaloricStatus::BadParams;
        }
        let dx: Vec<f64> = (0..n).map(|i| unsafe { *x.add(i) }).collect();
        let (v, _) = heat_kernel(&dx, t, n);
        unsafe { *out = v };
        CaloricStatus::Ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slab_handle() -> *mut CaloricDomain {
        let text = CString::new("kind = \"half_space_slab\"\nn = 1\nwidth = 2.0\nt_end = 1.0")
            .unwrap();
        let mut out: *mut CaloricDomain = std::ptr::null_mut();
        let st = unsafe { caloric_domain_from_toml(text.as_ptr(), &mut out) };
        assert_eq!(st, CaloricStatus::Ok);
        assert!(!out.is_null());
        out
    }

    #[test]
    fn domain_roundtrip_and_queries() {
        let dom = slab_handle();
        assert_eq!(unsafe { caloric_domain_dim(dom) }, 1);
        let inside = [1.0];
        let outside = [-0.5];
        assert_eq!(unsafe { caloric_domain_contains(dom, inside.as_ptr(), 0.5) }, 1);
        assert_eq!(unsafe { caloric_domain_contains(dom, outside.as_ptr(), 0.5) }, 0);
        let mut d = 0.0;
        let st = unsafe {
            caloric_domain_boundary_distance(dom, inside.as_ptr(), 0.5, &mut d)
        };
        assert_eq!(st, CaloricStatus::Ok);
        assert!(d > 0.0 && d <= 1.0 + 1e-12, "slab distance {d}");
        unsafe { caloric_domain_free(dom) };
    }

    #[test]
    fn parse_failure_reports_a_message() {
        let text = CString::new("kind = \"no_such_shape\"").unwrap();
        let mut out: *mut CaloricDomain = std::ptr::null_mut();
        let st = unsafe { caloric_domain_from_toml(text.as_ptr(), &mut out) };
        assert_eq!(st, CaloricStatus::ParseError);
        assert!(out.is_null());
        let msg = unsafe { CStr::from_ptr(caloric_last_error()) };
        assert!(!msg.to_bytes().is_empty());
    }

    #[test]
    fn null_arguments_are_rejected() {
        let mut out: *mut CaloricDomain = std::ptr::null_mut();
        let st = unsafe { caloric_domain_from_toml(std::ptr::null(), &mut out) };
        assert_eq!(st, CaloricStatus::NullArgument);
        assert_eq!(unsafe { caloric_domain_dim(std::ptr::null()) }, -1);
        unsafe { caloric_domain_free(std::ptr::null_mut()) };
    }

    #[test]
    fn condition_a_passes_on_the_slab() {
        let dom = slab_handle();
        let mut theta = 0.0;
        let st = unsafe { caloric_check_condition_a(dom, 8, 4000, 0.05, 11, &mut theta) };
        assert_eq!(st, CaloricStatus::Ok);
        assert!((theta - 0.5).abs() < 0.05, "theta0_hat {theta}");
        unsafe { caloric_domain_free(dom) };
    }

    #[test]
    fn scalar_routines_match_the_core() {
        let mut v = 0.0;
        let st = unsafe { caloric_heat_ball_volume(1, 2.0, &mut v) };
        assert_eq!(st, CaloricStatus::Ok);
        assert!((v - heat_ball_volume(1, 2.0).unwrap()).abs() < 1e-15);
        assert_eq!(
            unsafe { caloric_heat_ball_volume(5, 1.0, &mut v) },
            CaloricStatus::BadParams
        );

        let x = [0.3];
        let mut k = 0.0;
        assert_eq!(unsafe { caloric_heat_kernel(x.as_ptr(), 1, 0.1, &mut k) }, CaloricStatus::Ok);
        let (want, _) = heat_kernel(&x, 0.1, 1);
        assert!((k - want).abs() < 1e-15);
        assert_eq!(unsafe { caloric_heat_kernel(x.as_ptr(), 1, -0.1, &mut k) }, CaloricStatus::Ok);
        assert_eq!(k, 0.0);
    }

    #[test]
    fn version_is_a_c_string() {
        let v = unsafe { CStr::from_ptr(caloric_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn header_is_generated() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/caloric.h");
        let text = std::fs::read_to_string(header).expect("generated header");
        for sym in [
            "caloric_domain_from_toml",
            "caloric_domain_free",
            "caloric_check_condition_a",
            "caloric_last_error",
            "CALORIC_STATUS_CHECK_FAILED",
        ] {
            assert!(text.contains(sym), "header lacks {sym}");
        }
    }
}
