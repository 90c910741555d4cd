//! C ABI over the `genclass` crate.
//!
//! Every function returns a [`GcStatus`]; on failure a message is available
//! from [`gc_last_error_message`] on the same thread. Objects and strings
//! handed out must be released with the matching `*_free` function.

use genclass::classpoly::{genclass, hilbert, r_curve, Algo, GenClassFunction};
use genclass::cli::hilbert_text;
use genclass::cmmethod::{cm_generalized, cm_hilbert, compute_psi_incremental, FrobeniusSpec, ModularPolynomial, DJ_X0PLUS119};
use genclass::nsystem::density;
use genclass::qexp::Basis;
use genclass::quadforms::Discriminant;
use genclass::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

pub type GcStatus = i32;

pub const GC_OK: GcStatus = 0;
pub const GC_ERR_NULL: GcStatus = 1;
pub const GC_ERR_PRECONDITION: GcStatus = 2;
pub const GC_ERR_PRECISION: GcStatus = 3;
pub const GC_ERR_PARSE: GcStatus = 4;
pub const GC_ERR_DEGENERATE: GcStatus = 5;
pub const GC_ERR_INTERNAL: GcStatus = 6;
pub const GC_ERR_PANIC: GcStatus = 7;

pub const GC_BASIS_STANDARD: i32 = 0;
pub const GC_BASIS_ETAMIXED: i32 = 1;

pub const GC_ALGO_LLL: i32 = 0;
pub const GC_ALGO_TREE: i32 = 1;
pub const GC_ALGO_BOTH: i32 = 2;

pub const GC_VIA_HILBERT: i32 = 0;
pub const GC_VIA_X0PLUS119: i32 = 1;

/// Opaque generalized class function.
pub struct GcClassFunction {
    inner: GenClassFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GcStatus {
    match e {
        Error::Precondition(_) | Error::NoValidB(_) => GC_ERR_PRECONDITION,
        Error::InsufficientPrecision(_) | Error::PrecisionBlowup(_) => GC_ERR_PRECISION,
        Error::Parse(_) => GC_ERR_PARSE,
        Error::DegenerateReduction(_) => GC_ERR_DEGENERATE,
        _ => GC_ERR_INTERNAL,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), (GcStatus, String)>>(f: F) -> GcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GC_OK,
        Ok(Err((s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("panic inside genclass".into());
            GC_ERR_PANIC
        }
    }
}

fn lift<T>(r: genclass::Result<T>) -> Result<T, (GcStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null_err(what: &str) -> (GcStatus, String) {
    (GC_ERR_NULL, format!("{what} is null"))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn disc(d: i64) -> Result<Discriminant, (GcStatus, String)> {
    lift(Discriminant::new(d))
}

/// Message of the last failed call on this thread, or NULL. Owned by the library;
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Compute the class function of `d`. `agree_out` (may be NULL) receives 1/0 for
/// `GC_ALGO_BOTH` and -1 otherwise.
///
/// # Safety
/// `out` must be a valid pointer; `agree_out` must be NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn gc_genclass_compute(d: i64, basis: i32, algo: i32, out: *mut *mut GcClassFunction, agree_out: *mut i32) -> GcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let basis = match basis {
            GC_BASIS_STANDARD => Basis::Standard,
            GC_BASIS_ETAMIXED => Basis::EtaMixed,
            b => return Err((GC_ERR_PRECONDITION, format!("unknown basis {b}"))),
        };
        let algo = match algo {
            GC_ALGO_LLL => Algo::Lll,
            GC_ALGO_TREE => Algo::Tree,
            GC_ALGO_BOTH => Algo::Both,
            a => return Err((GC_ERR_PRECONDITION, format!("unknown algorithm {a}"))),
        };
        let o = lift(genclass(disc(d)?, basis, algo))?;
        if !agree_out.is_null() {
            *agree_out = o.agree.map_or(-1, i32::from);
        }
        *out = Box::into_raw(Box::new(GcClassFunction { inner: o.function }));
        Ok(())
    })
}

/// Serialize in the monomial-per-line text format. Free the result with [`gc_string_free`].
///
/// # Safety
/// `f` must come from [`gc_genclass_compute`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gc_class_function_to_string(f: *const GcClassFunction, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null_err("function"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        *out = to_c_string(f.inner.to_text());
        Ok(())
    })
}

/// Conventional notation, e.g. `y + 1`. Free the result with [`gc_string_free`].
///
/// # Safety
/// As for [`gc_class_function_to_string`].
#[no_mangle]
pub unsafe extern "C" fn gc_class_function_pretty(f: *const GcClassFunction, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        let f = f.as_ref().ok_or_else(|| null_err("function"))?;
        if out.is_null() {
            return Err(null_err("out"));
        }
        *out = to_c_string(f.inner.pretty());
        Ok(())
    })
}

/// Pole order at the point at infinity, or -1 for NULL.
///
/// # Safety
/// `f` must be NULL or come from [`gc_genclass_compute`].
#[no_mangle]
pub unsafe extern "C" fn gc_class_function_pole_order(f: *const GcClassFunction) -> i64 {
    f.as_ref().map_or(-1, |f| f.inner.pole_order() as i64)
}

/// # Safety
/// `f` must be NULL or come from [`gc_genclass_compute`], and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gc_class_function_free(f: *mut GcClassFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn gc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `H_D` as text (`<coeff> <deg> 0` per line). Free the result with [`gc_string_free`].
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gc_hilbert(d: i64, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let d = disc(d)?;
        let h = lift(hilbert(d, None))?;
        *out = to_c_string(hilbert_text(d, &h));
        Ok(())
    })
}

fn write_rational(r: &rug::Rational, num: *mut u64, den: *mut u64) -> Result<(), (GcStatus, String)> {
    if num.is_null() || den.is_null() {
        return Err(null_err("num/den"));
    }
    let (n, d) = (r.numer().to_u64(), r.denom().to_u64());
    match (n, d) {
        (Some(n), Some(d)) => {
            unsafe {
                *num = n;
                *den = d;
            }
            Ok(())
        }
        _ => Err((GC_ERR_INTERNAL, format!("{r} does not fit in 64 bits"))),
    }
}

/// Density of discriminants with a Fricke-compatible N-system, as `num/den`.
///
/// # Safety
/// `num` and `den` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gc_density(n: u64, fundamental: bool, num: *mut u64, den: *mut u64) -> GcStatus {
    guard(|| write_rational(&lift(density(n, fundamental))?, num, den))
}

/// Reduction factor of `X0(N)` (or `X0+(N)` if `plus`), as `num/den`.
///
/// # Safety
/// `num` and `den` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gc_rfactor(n: u64, plus: bool, num: *mut u64, den: *mut u64) -> GcStatus {
    guard(|| write_rational(&lift(r_curve(n, plus))?, num, den))
}

fn cached_psi() -> Result<&'static ModularPolynomial, (GcStatus, String)> {
    static PSI: OnceLock<Result<ModularPolynomial, Error>> = OnceLock::new();
    PSI.get_or_init(|| compute_psi_incremental(DJ_X0PLUS119, 512)).as_ref().map_err(|e| (status_of(e), e.to_string()))
}

/// Curve over `F_q` with `q + 1 - t` points as JSON `{q, a1..a6, count}`.
/// Free the result with [`gc_string_free`].
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn gc_cm(t: i64, q: u64, via: i32, seed: u64, out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_err("out"));
        }
        let spec = lift(FrobeniusSpec::new(t, q))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = match via {
            GC_VIA_HILBERT => lift(cm_hilbert(&spec, &mut rng))?,
            GC_VIA_X0PLUS119 => lift(cm_generalized(&spec, cached_psi()?, &mut rng))?,
            v => return Err((GC_ERR_PRECONDITION, format!("unknown pipeline {v}"))),
        };
        *out = to_c_string(o.curve.to_json());
        Ok(())
    })
}
