//! C ABI over `tensorid`.
//!
//! Every fallible function returns a [`TidStatus`]; on anything other than
//! `TID_STATUS_OK` the calling thread's [`tid_last_error_message`] describes
//! the failure and out-parameters are left untouched. Certificates are opaque
//! handles released with [`tid_certificate_free`]; strings returned to the
//! caller are released with [`tid_string_free`]. Panics never cross the
//! boundary: they surface as `TID_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tensorid::bounds;
use tensorid::certificate::{certify, Certificate, CertifyOptions, Mode, RunConfig, Verdict};
use tensorid::exactlin::{PrimeField, RngState};
use tensorid::segre::{Format, Problem};
use tensorid::wdcheck::{check_not_wdef, FirstOrderVerdict};
use tensorid::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TidStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    ComputationAborted = 3,
    Internal = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TidVerdict {
    Pass = 0,
    Fail = 1,
    KnownException = 2,
    Incomplete = 3,
}

/// Outcome of the first-order check; `VACUOUS` when the span fills the ambient space.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TidCheck {
    Pass = 0,
    Fail = 1,
    Vacuous = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TidMode {
    FirstOrder = 0,
    Groebner = 1,
    Both = 2,
}

/// Run configuration; fill with [`tid_config_default`] before changing fields.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TidConfig {
    pub prime: u32,
    pub seed: u64,
    pub trials: u32,
    pub mode: TidMode,
    /// Gröbner work limit in term operations.
    pub budget: u64,
}

/// Opaque certificate handle.
pub struct TidCertificate {
    cert: Certificate,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: TidStatus, message: &str) -> TidStatus {
    set_error(message);
    status
}

fn from_error(e: Error) -> TidStatus {
    let status = match e {
        Error::Aborted(_) => TidStatus::ComputationAborted,
        _ => TidStatus::InvalidArgument,
    };
    fail(status, &e.to_string())
}

/// Runs `f`, mapping panics to `TID_STATUS_INTERNAL`.
fn guard(f: impl FnOnce() -> Result<(), TidStatus>) -> TidStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TidStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(TidStatus::Internal, &format!("internal error: {msg}"))
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return Err(fail(TidStatus::NullPointer, concat!("`", stringify!($p), "` is null")));
        })+
    };
}

/// # Safety
/// `ptr` must be null or point to `len` readable values.
unsafe fn slice<'a, T>(ptr: *const T, len: usize) -> &'a [T] {
    if len == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(ptr, len)
    }
}

unsafe fn format_from(dims: *const usize, n: usize) -> Result<Format, TidStatus> {
    non_null!(dims);
    Format::new(slice(dims, n).to_vec()).map_err(from_error)
}

/// `aux` may be null for a problem without aux points.
unsafe fn problem_from(dims: *const usize, n: usize, k: usize, aux: *const usize) -> Result<Problem, TidStatus> {
    non_null!(dims);
    let dims = slice(dims, n).to_vec();
    let aux = if aux.is_null() { vec![0; n] } else { slice(aux, n).to_vec() };
    Problem::new(dims, k, aux).map_err(from_error)
}

fn run_config(config: Option<&TidConfig>) -> RunConfig {
    let mut rc = RunConfig::default();
    if let Some(c) = config {
        rc.prime = c.prime;
        rc.seed = c.seed;
        rc.trials = c.trials as usize;
        rc.budget = c.budget;
        rc.mode = match c.mode {
            TidMode::FirstOrder => Mode::FirstOrder,
            TidMode::Groebner => Mode::Groebner,
            TidMode::Both => Mode::Both,
        };
    }
    rc
}

/// Message for the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tid_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Fills `out` with the defaults the command-line tool uses.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tid_config_default(out: *mut TidConfig) -> TidStatus {
    guard(|| {
        non_null!(out);
        let rc = RunConfig::default();
        *out = TidConfig {
            prime: rc.prime,
            seed: rc.seed,
            trials: rc.trials as u32,
            mode: TidMode::FirstOrder,
            budget: rc.budget,
        };
        Ok(())
    })
}

/// Certifies the problem `(dims[0..n]; k; aux[0..n])`. `aux` and `config` may
/// be null (no aux points, default configuration). On success `*out` owns a
/// new handle.
///
/// # Safety
/// `dims` (and `aux` if non-null) must point to `n` values; `config` must be
/// null or valid; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tid_certify(
    dims: *const usize,
    n: usize,
    k: usize,
    aux: *const usize,
    config: *const TidConfig,
    out: *mut *mut TidCertificate,
) -> TidStatus {
    guard(|| {
        non_null!(out);
        let problem = problem_from(dims, n, k, aux)?;
        let rc = run_config(config.as_ref());
        let cert = certify(&problem, &rc, &CertifyOptions::default(), None).map_err(from_error)?;
        *out = Box::into_raw(Box::new(TidCertificate { cert }));
        Ok(())
    })
}

/// # Safety
/// `cert` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tid_certificate_verdict(cert: *const TidCertificate, out: *mut TidVerdict) -> TidStatus {
    guard(|| {
        non_null!(cert, out);
        *out = match (*cert).cert.verdict {
            Verdict::Pass => TidVerdict::Pass,
            Verdict::Fail => TidVerdict::Fail,
            Verdict::KnownException => TidVerdict::KnownException,
            Verdict::Incomplete => TidVerdict::Incomplete,
        };
        Ok(())
    })
}

/// Canonical JSON of the certificate; free `*out` with [`tid_string_free`].
///
/// # Safety
/// `cert` must be null or a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tid_certificate_json(cert: *const TidCertificate, out: *mut *mut c_char) -> TidStatus {
    guard(|| {
        non_null!(cert, out);
        let json = CString::new((*cert).cert.to_json()).map_err(|_| fail(TidStatus::Internal, "NUL in JSON"))?;
        *out = json.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tid_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `cert` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tid_certificate_free(cert: *mut TidCertificate) {
    if !cert.is_null() {
        drop(Box::from_raw(cert));
    }
}

/// Largest `k` whose expected secant dimension fits the ambient space.
///
/// # Safety
/// `dims` must point to `n` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tid_k_max(dims: *const usize, n: usize, out: *mut u64) -> TidStatus {
    guard(|| {
        non_null!(out);
        *out = bounds::k_max(&format_from(dims, n)?);
        Ok(())
    })
}

/// Identifiability bound from the power-of-`base` reductions.
///
/// # Safety
/// `dims` must point to `n` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tid_co_bound(dims: *const usize, n: usize, base: u64, out: *mut u64) -> TidStatus {
    guard(|| {
        non_null!(out);
        if base < 2 {
            return Err(fail(TidStatus::InvalidArgument, "base must be at least 2"));
        }
        *out = bounds::co_bound(&format_from(dims, n)?, base);
        Ok(())
    })
}

/// Largest `k` satisfying Kruskal's inequality.
///
/// # Safety
/// `dims` must point to `n` values; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tid_kruskal_max(dims: *const usize, n: usize, out: *mut u64) -> TidStatus {
    guard(|| {
        non_null!(out);
        *out = bounds::kruskal_max(&format_from(dims, n)?);
        Ok(())
    })
}

/// Randomized first-order check of `(dims; k; aux)` over `F_prime`.
/// `out_span_rank` may be null.
///
/// # Safety
/// `dims` (and `aux` if non-null) must point to `n` values; `out` must be
/// valid for writes, as must `out_span_rank` when non-null.
#[no_mangle]
pub unsafe extern "C" fn tid_check_not_wdef(
    dims: *const usize,
    n: usize,
    k: usize,
    aux: *const usize,
    prime: u32,
    seed: u64,
    trials: u32,
    out: *mut TidCheck,
    out_span_rank: *mut usize,
) -> TidStatus {
    guard(|| {
        non_null!(out);
        let problem = problem_from(dims, n, k, aux)?;
        let field = PrimeField::new(prime).map_err(from_error)?;
        let report =
            check_not_wdef(&problem, field, trials as usize, &mut RngState::new(seed)).map_err(from_error)?;
        *out = match report.verdict {
            FirstOrderVerdict::Pass => TidCheck::Pass,
            FirstOrderVerdict::Fail => TidCheck::Fail,
            FirstOrderVerdict::Vacuous => TidCheck::Vacuous,
        };
        if !out_span_rank.is_null() {
            *out_span_rank = report.span_rank;
        }
        Ok(())
    })
}
