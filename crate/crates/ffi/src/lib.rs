//! C ABI over `koch-billiards`.
//!
//! Objects are opaque handles created by `kb_*_new`/`kb_*_run` and released
//! with the matching `kb_*_free`. Every fallible call returns a
//! [`KbStatus`]; the message of the last failure on the calling thread is
//! available from [`kb_last_error`]. Strings handed out by the library must
//! be released with [`kb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use koch_billiards::billiard::{is_hybrid, run_orbit, Direction, InitialCondition, Orbit, OrbitStatus};
use koch_billiards::exact::{parse_rational, rat, to_cartesian};
use koch_billiards::prefractal::{build_prefractal_capped, BoundaryPoint, Prefractal, DEFAULT_LEVEL_CAP};
use koch_billiards::surface::surface_census;
use koch_billiards::ternary::classify;
use koch_billiards::Error;

/// Result codes. Domain, verification and resource failures share their
/// values with the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KbStatus {
    Ok = 0,
    Io = 1,
    Domain = 2,
    Verification = 3,
    Resource = 4,
    NullPointer = 5,
    InvalidUtf8 = 6,
    Panic = 7,
}

/// Kind of a traced orbit.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KbOrbitKind {
    Periodic = 0,
    Singular = 1,
    Truncated = 2,
    DenseByDirection = 3,
}

/// Opaque prefractal handle.
pub struct KbPrefractal(Prefractal);

/// Opaque orbit handle.
pub struct KbOrbit(Orbit);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KbStatus {
    match e.exit_code() {
        3 => KbStatus::Verification,
        4 => KbStatus::Resource,
        1 => KbStatus::Io,
        _ => KbStatus::Domain,
    }
}

/// Runs `f`, recording any error or panic for [`kb_last_error`].
fn guard(f: impl FnOnce() -> Result<(), KbStatus>) -> KbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KbStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside koch-billiards".into());
            KbStatus::Panic
        }
    }
}

fn fail(e: Error) -> KbStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> KbStatus {
    set_error(format!("{what} is null"));
    KbStatus::NullPointer
}

fn out_string(s: String, out: *mut *mut c_char) -> Result<(), KbStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let c = CString::new(s).map_err(|_| KbStatus::InvalidUtf8)?;
    // SAFETY: `out` is non-null and points to writable storage per the contract.
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message of the last failed call on this thread, or null. Owned by the
/// library; valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds `KS_level`. Levels above the default cap fail with `Resource`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn kb_prefractal_new(level: u32, out: *mut *mut KbPrefractal) -> KbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let p = build_prefractal_capped(level, DEFAULT_LEVEL_CAP).map_err(fail)?;
        *out = Box::into_raw(Box::new(KbPrefractal(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from [`kb_prefractal_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kb_prefractal_free(p: *mut KbPrefractal) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of vertices (equal to the number of sides), or 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kb_prefractal_num_vertices(p: *const KbPrefractal) -> usize {
    p.as_ref().map_or(0, |p| p.0.vertices().len())
}

/// Cartesian coordinates of vertex `i` (0-based).
///
/// # Safety
/// `p` must be a live handle; `x` and `y` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kb_prefractal_vertex(p: *const KbPrefractal, i: usize, x: *mut f64, y: *mut f64) -> KbStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("prefractal"))?;
        if x.is_null() || y.is_null() {
            return Err(null("output pointer"));
        }
        let v = p.0.vertices().get(i).ok_or_else(|| fail(Error::Domain(format!("vertex {i} out of range"))))?;
        let (cx, cy) = to_cartesian(v);
        *x = cx;
        *y = cy;
        Ok(())
    })
}

/// Exact vertex list as JSON. Release with [`kb_string_free`].
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kb_prefractal_to_json(p: *const KbPrefractal, out: *mut *mut c_char) -> KbStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("prefractal"))?;
        out_string(p.0.to_json().to_string(), out)
    })
}

/// Traces the orbit from `t_num/t_den` on side `side` (1-based) in lattice
/// direction `(dir_a, dir_b)`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kb_orbit_run(
    p: *const KbPrefractal,
    side: usize,
    t_num: i64,
    t_den: i64,
    dir_a: i64,
    dir_b: i64,
    max_steps: usize,
    out: *mut *mut KbOrbit,
) -> KbStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("prefractal"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        if t_den == 0 {
            return Err(fail(Error::Domain("zero denominator".into())));
        }
        if side == 0 || side > p.0.num_sides() {
            return Err(fail(Error::Domain(format!("side {side} out of range"))));
        }
        let dir = Direction::exact(dir_a, dir_b).map_err(fail)?;
        let init = InitialCondition::new(&p.0, BoundaryPoint::new(side - 1, rat(t_num, t_den)), dir).map_err(fail)?;
        let o = run_orbit(&p.0, &init, max_steps).map_err(fail)?;
        *out = Box::into_raw(Box::new(KbOrbit(o)));
        Ok(())
    })
}

/// # Safety
/// `o` must come from [`kb_orbit_run`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kb_orbit_free(o: *mut KbOrbit) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// # Safety
/// `o` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kb_orbit_kind(o: *const KbOrbit, out: *mut KbOrbitKind) -> KbStatus {
    guard(|| {
        let o = o.as_ref().ok_or_else(|| null("orbit"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = match o.0.status {
            OrbitStatus::Periodic { .. } => KbOrbitKind::Periodic,
            OrbitStatus::Singular { .. } => KbOrbitKind::Singular,
            OrbitStatus::Truncated { .. } => KbOrbitKind::Truncated,
            OrbitStatus::DenseByDirection => KbOrbitKind::DenseByDirection,
        };
        Ok(())
    })
}

/// Period of a periodic orbit, 0 otherwise or for null.
///
/// # Safety
/// `o` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kb_orbit_period(o: *const KbOrbit) -> usize {
    o.as_ref().and_then(|o| o.0.period()).unwrap_or(0)
}

/// Number of forward basepoints, 0 for null.
///
/// # Safety
/// `o` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kb_orbit_len(o: *const KbOrbit) -> usize {
    o.as_ref().map_or(0, |o| o.0.footprint.len())
}

/// Hybrid verdict of a closed orbit.
///
/// # Safety
/// `o` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kb_orbit_is_hybrid(o: *const KbOrbit, out: *mut bool) -> KbStatus {
    guard(|| {
        let o = o.as_ref().ok_or_else(|| null("orbit"))?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = is_hybrid(&o.0).map_err(fail)?;
        Ok(())
    })
}

/// Orbit report as JSON. Release with [`kb_string_free`].
///
/// # Safety
/// `o` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kb_orbit_to_json(o: *const KbOrbit, out: *mut *mut c_char) -> KbStatus {
    guard(|| {
        let o = o.as_ref().ok_or_else(|| null("orbit"))?;
        out_string(o.0.to_json().to_string(), out)
    })
}

/// Ternary type of a fraction in `[0, 1]` given as text, e.g. `"7/12"`,
/// rendered like `[lr,c]`. Release with [`kb_string_free`].
///
/// # Safety
/// `t` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kb_classify(t: *const c_char, out: *mut *mut c_char) -> KbStatus {
    guard(|| {
        if t.is_null() {
            return Err(null("fraction"));
        }
        let s = CStr::from_ptr(t).to_str().map_err(|_| {
            set_error("fraction is not UTF-8".into());
            KbStatus::InvalidUtf8
        })?;
        let r = parse_rational(s).ok_or_else(|| fail(Error::Domain(format!("bad fraction {s:?}"))))?;
        let ty = classify(&r).map_err(fail)?;
        out_string(ty.to_string(), out)
    })
}

/// Genus and Euler characteristic of the surface glued from six copies of
/// `KS_level`.
///
/// # Safety
/// `genus` and `chi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kb_surface_genus(level: u32, genus: *mut i64, chi: *mut i64) -> KbStatus {
    guard(|| {
        if genus.is_null() || chi.is_null() {
            return Err(null("output pointer"));
        }
        let c = surface_census(level).map_err(fail)?;
        *genus = c.genus;
        *chi = c.euler_characteristic;
        Ok(())
    })
}
