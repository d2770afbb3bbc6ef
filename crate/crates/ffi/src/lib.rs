//! C ABI over `linecell`.
//!
//! Every function returns a [`LinecellStatus`] and writes results through
//! out-pointers. On failure a message is kept per thread and can be read with
//! [`linecell_last_error`]. Parameter sets live behind an opaque handle that
//! caches the gain distribution between calls.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use linecell::channel::{ChannelParams, CompositeGainDist};
use linecell::hard_fairness::{mc_ebn0, sc_ebn0, spectral_efficiency_limit};
use linecell::numerics::hurwitz_zeta;
use linecell::partial_reuse::PartialReuseModel;
use linecell::pfs::{lower_bound, pfs_capacity_limit, simulate_pfs, upper_bound, PfsSimConfig, SelectionRule};
use linecell::simplified::beta_effective;
use linecell::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinecellStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    /// The load is beyond the interference limit.
    LimitExceeded = 4,
    /// Quadrature, root finding or an iteration failed to converge.
    Numerical = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Scheduling rule for [`linecell_pfs_simulate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinecellRule {
    AsymptoticMaxFading = 0,
    LiteralPfs = 1,
}

/// Opaque parameter set.
pub struct LinecellParams {
    params: ChannelParams,
    dist: OnceLock<Result<CompositeGainDist, Error>>,
    partial: OnceLock<Result<PartialReuseModel, Error>>,
}

impl LinecellParams {
    fn dist(&self) -> Result<&CompositeGainDist, Error> {
        self.dist
            .get_or_init(|| {
                self.params.require_delay_limited()?;
                CompositeGainDist::full(&self.params)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn partial(&self) -> Result<&PartialReuseModel, Error> {
        self.partial.get_or_init(|| PartialReuseModel::new(&self.params)).as_ref().map_err(Clone::clone)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> LinecellStatus {
    match e {
        Error::InvalidParams(_) => LinecellStatus::InvalidArgument,
        Error::Domain(_) => LinecellStatus::Domain,
        Error::LimitExceeded { .. } => LinecellStatus::LimitExceeded,
        _ => LinecellStatus::Numerical,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard<F>(f: F) -> LinecellStatus
where
    F: FnOnce() -> Result<(), Fail>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            LinecellStatus::Ok
        }
        Ok(Err(Fail::Null(name))) => {
            set_error(&format!("null pointer: {name}"));
            LinecellStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal error");
            LinecellStatus::Internal
        }
    }
}

unsafe fn handle<'a>(p: *const LinecellParams) -> Result<&'a LinecellParams, Fail> {
    p.as_ref().ok_or(Fail::Null("params"))
}

unsafe fn write<T>(out: *mut T, v: T, name: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(name));
    }
    out.write(v);
    Ok(())
}

fn check_out<T>(out: *mut T, name: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        Err(Fail::Null(name))
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn linecell_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn linecell_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a parameter set. Free it with [`linecell_params_free`].
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn linecell_params_new(
    alpha: f64,
    d: f64,
    delta: f64,
    m: usize,
    out: *mut *mut LinecellParams,
) -> LinecellStatus {
    guard(|| {
        check_out(out, "out")?;
        let params = ChannelParams::new(alpha, d, delta, m)?;
        let boxed = Box::new(LinecellParams { params, dist: OnceLock::new(), partial: OnceLock::new() });
        write(out, Box::into_raw(boxed), "out")
    })
}

/// Parameter set with the library defaults (alpha 2, D 2, delta 0.01, M 10).
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn linecell_params_default(out: *mut *mut LinecellParams) -> LinecellStatus {
    let p = ChannelParams::default();
    linecell_params_new(p.alpha, p.d, p.delta, p.m, out)
}

/// # Safety
/// `params` must come from [`linecell_params_new`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn linecell_params_free(params: *mut LinecellParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Hurwitz zeta `sum_{n>=0} (n + q)^-a` for `a > 1`, `q > 0`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn linecell_hurwitz_zeta(a: f64, q: f64, out: *mut f64) -> LinecellStatus {
    guard(|| {
        check_out(out, "out")?;
        write(out, hurwitz_zeta(a, q)?, "out")
    })
}

/// Single-cell system Eb/N0 in dB at spectral efficiency `c`.
///
/// # Safety
/// `params` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn linecell_sc_ebn0_db(params: *const LinecellParams, c: f64, out: *mut f64) -> LinecellStatus {
    guard(|| {
        let h = handle(params)?;
        check_out(out, "out")?;
        write(out, sc_ebn0(c, h.dist()?)?.ebn0_db, "out")
    })
}

/// Multi-cell system Eb/N0 in dB; `LimitExceeded` at or beyond C0.
///
/// # Safety
/// `params` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn linecell_mc_ebn0_db(params: *const LinecellParams, c: f64, out: *mut f64) -> LinecellStatus {
    guard(|| {
        let h = handle(params)?;
        check_out(out, "out")?;
        write(out, mc_ebn0(c, h.dist()?, &h.params)?.ebn0_db, "out")
    })
}

/// Spectral-efficiency limit C0 in bit/s/Hz.
///
/// # Safety
/// `params` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn linecell_spectral_efficiency_limit(
    params: *const LinecellParams,
    out: *mut f64,
) -> LinecellStatus {
    guard(|| {
        let h = handle(params)?;
        check_out(out, "out")?;
        write(out, spectral_efficiency_limit(h.dist()?, &h.params)?, "out")
    })
}

/// Effective interference ratio at `c` and its geometric bounds. `lower` and
/// `upper` may be null.
///
/// # Safety
/// `params` must be a live handle; non-null pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn linecell_beta_effective(
    params: *const LinecellParams,
    c: f64,
    beta: *mut f64,
    lower: *mut f64,
    upper: *mut f64,
) -> LinecellStatus {
    guard(|| {
        let h = handle(params)?;
        check_out(beta, "beta")?;
        let b = beta_effective(c, h.dist()?, &h.params)?;
        write(beta, b.beta, "beta")?;
        if !lower.is_null() {
            lower.write(b.lower);
        }
        if !upper.is_null() {
            upper.write(b.upper);
        }
        Ok(())
    })
}

/// Partial-reuse system Eb/N0 in dB at load `c` and reuse radius `r0`.
///
/// # Safety
/// `params` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn linecell_partial_ebn0_db(
    params: *const LinecellParams,
    c: f64,
    r0: f64,
    out: *mut f64,
) -> LinecellStatus {
    guard(|| {
        let h = handle(params)?;
        check_out(out, "out")?;
        write(out, h.partial()?.ebn0(c, r0)?.ebn0_db, "out")
    })
}

/// Reuse radius minimizing the partial-reuse Eb/N0 at `c`, and that Eb/N0 in dB.
///
/// # Safety
/// `params` must be a live handle; `r0` and `ebn0_db` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn linecell_optimize_r0(
    params: *const LinecellParams,
    c: f64,
    r0: *mut f64,
    ebn0_db: *mut f64,
) -> LinecellStatus {
    guard(|| {
        let h = handle(params)?;
        check_out(r0, "r0")?;
        check_out(ebn0_db, "ebn0_db")?;
        let opt = h.partial()?.optimize_r0(c)?;
        write(r0, opt.r0, "r0")?;
        write(ebn0_db, opt.state.point.ebn0_db, "ebn0_db")
    })
}

/// Proportional-fair lower bound in bit/s/Hz.
///
/// # Safety
/// `params` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn linecell_pfs_lower_bound(
    params: *const LinecellParams,
    rho: f64,
    k: usize,
    out: *mut f64,
) -> LinecellStatus {
    guard(|| {
        let h = handle(params)?;
        check_out(out, "out")?;
        write(out, lower_bound(rho, k, &h.params)?, "out")
    })
}

/// Proportional-fair two-cell upper bound; `std_error` may be null.
///
/// # Safety
/// `params` must be a live handle; non-null pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn linecell_pfs_upper_bound(
    params: *const LinecellParams,
    rho: f64,
    k: usize,
    mc_samples: usize,
    seed: u64,
    mean: *mut f64,
    std_error: *mut f64,
) -> LinecellStatus {
    guard(|| {
        let h = handle(params)?;
        check_out(mean, "mean")?;
        let ub = upper_bound(rho, k, &h.params, mc_samples, seed)?;
        write(mean, ub.mean, "mean")?;
        if !std_error.is_null() {
            std_error.write(ub.std_error);
        }
        Ok(())
    })
}

/// High-SNR proportional-fair limit on a ring of `n_cells`; `std_error` may be null.
///
/// # Safety
/// `params` must be a live handle; non-null pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn linecell_pfs_capacity_limit(
    params: *const LinecellParams,
    k: usize,
    n_cells: usize,
    mc_samples: usize,
    seed: u64,
    mean: *mut f64,
    std_error: *mut f64,
) -> LinecellStatus {
    guard(|| {
        let h = handle(params)?;
        check_out(mean, "mean")?;
        let l = pfs_capacity_limit(k, &h.params, n_cells, mc_samples, seed)?;
        write(mean, l.mean, "mean")?;
        if !std_error.is_null() {
            std_error.write(l.std_error);
        }
        Ok(())
    })
}

/// Ring simulation of proportional-fair scheduling with the default window
/// (1000 slots) and one subchannel. `std_error` may be null.
///
/// # Safety
/// `params` must be a live handle; non-null pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn linecell_pfs_simulate(
    params: *const LinecellParams,
    k: usize,
    rho: f64,
    n_cells: usize,
    n_slots: usize,
    trials: usize,
    seed: u64,
    rule: LinecellRule,
    c: *mut f64,
    std_error: *mut f64,
) -> LinecellStatus {
    guard(|| {
        let h = handle(params)?;
        check_out(c, "c")?;
        let rule = match rule {
            LinecellRule::AsymptoticMaxFading => SelectionRule::AsymptoticMaxFading,
            LinecellRule::LiteralPfs => SelectionRule::LiteralPfs,
        };
        let cfg = PfsSimConfig { n_cells, n_slots, trials, seed, ..PfsSimConfig::new(k, rho, rule) };
        let r = simulate_pfs(&cfg, &h.params)?;
        write(c, r.c_estimate, "c")?;
        if !std_error.is_null() {
            std_error.write(r.std_error);
        }
        Ok(())
    })
}
