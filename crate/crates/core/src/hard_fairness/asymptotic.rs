//! Large-K delay-limited operating points.
//!
//! With every user on its strongest subchannel and successive decoding in
//! ascending-gain order, the required system `Eb/N0` at spectral efficiency
//! `c` (bit/s/Hz) is `ln2 * J(c)` for an isolated cell and
//! `ln2 * J(c) / (1 - c ln2 * K(c))` on the infinite line, where
//!
//! * `J(c) = int 2^(c G(x)) dG(x) / x`
//! * `K(c) = iint 2^(c G(xy)) Phi(x) dF_s(x) dH_M(y) / (x y)`.

use serde::Serialize;

use crate::channel::{phi_at_distance, ChannelParams, CompositeGainDist};
use crate::error::{Error, Result};
use crate::numerics::{to_db, try_find_root_bracketed};

/// A point on the spectral-efficiency / system `Eb/N0` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingPoint {
    /// Spectral efficiency in bit/s/Hz.
    pub c: f64,
    pub ebn0_linear: f64,
    pub ebn0_db: f64,
}

impl OperatingPoint {
    pub fn from_linear(c: f64, ebn0_linear: f64) -> Self {
        Self { c, ebn0_linear, ebn0_db: to_db(ebn0_linear) }
    }
}

fn check_load(c: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Domain(format!("spectral efficiency must be positive, got {c}")));
    }
    Ok(())
}

fn check_dist(dist: &CompositeGainDist) -> Result<()> {
    if dist.m < 2 {
        return Err(Error::InvalidParams(
            "delay-limited evaluation requires M >= 2 (E[1/gain] diverges for M = 1)".into(),
        ));
    }
    Ok(())
}

/// `int 2^(c G(x)) dG(x) / x`; `c = 0` gives `E[1/X]`.
pub fn sc_integral(c: f64, dist: &CompositeGainDist) -> Result<f64> {
    check_dist(dist)?;
    let alpha = dist.alpha;
    dist.expect(|u, y| {
        let ua = u.powf(alpha);
        let g = if c == 0.0 { 0.0 } else { dist.cdf_interp(y / ua)? };
        Ok((c * g).exp2() * ua / y)
    })
}

/// `iint 2^(c G(xy)) kernel(u) dF_s(x) dH_M(y) / (x y)`, `u = x^(-1/alpha)`
/// being the user's distance from its own BS.
pub fn interference_integral<K>(c: f64, dist: &CompositeGainDist, mut kernel: K) -> Result<f64>
where
    K: FnMut(f64) -> Result<f64>,
{
    check_dist(dist)?;
    let alpha = dist.alpha;
    // the kernel depends on u only; the inner y-integral reuses it
    let mut cached = (f64::NAN, 0.0);
    dist.expect(|u, y| {
        if u != cached.0 {
            cached = (u, kernel(u)?);
        }
        let ua = u.powf(alpha);
        let g = if c == 0.0 { 0.0 } else { dist.cdf_interp(y / ua)? };
        Ok((c * g).exp2() * cached.1 * ua / y)
    })
}

/// Single-cell minimum system `Eb/N0`.
pub fn sc_ebn0(c: f64, dist: &CompositeGainDist) -> Result<OperatingPoint> {
    check_load(c)?;
    Ok(OperatingPoint::from_linear(c, std::f64::consts::LN_2 * sc_integral(c, dist)?))
}

/// `1 - c ln2 K(c)`; strictly decreasing in `c`, its root is the limit `C0`.
pub fn mc_denominator(c: f64, dist: &CompositeGainDist, params: &ChannelParams) -> Result<f64> {
    let k = interference_integral(c, dist, |u| phi_at_distance(u, params))?;
    Ok(1.0 - c * std::f64::consts::LN_2 * k)
}

/// Infinite-line minimum system `Eb/N0`; fails past the spectral-efficiency limit.
pub fn mc_ebn0(c: f64, dist: &CompositeGainDist, params: &ChannelParams) -> Result<OperatingPoint> {
    check_load(c)?;
    let den = mc_denominator(c, dist, params)?;
    if !(den > 0.0) {
        return Err(Error::LimitExceeded { c });
    }
    let sc = sc_ebn0(c, dist)?;
    Ok(OperatingPoint::from_linear(c, sc.ebn0_linear / den))
}

const LIMIT_BRACKET: (f64, f64) = (1e-3, 64.0);
const LIMIT_SEARCH_CAP: f64 = 4096.0;

/// Spectral-efficiency limit `C0`, the root of [`mc_denominator`].
///
/// Returns `f64::INFINITY` when the denominator stays positive up to the
/// search cap.
pub fn spectral_efficiency_limit(dist: &CompositeGainDist, params: &ChannelParams) -> Result<f64> {
    check_dist(dist)?;
    let den = |c: f64| mc_denominator(c, dist, params);
    let (mut lo, mut hi) = LIMIT_BRACKET;
    if den(lo)? <= 0.0 {
        return Err(Error::Domain(format!("denominator already non-positive at c = {lo}")));
    }
    while den(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > LIMIT_SEARCH_CAP {
            return Ok(f64::INFINITY);
        }
    }
    try_find_root_bracketed(den, lo, hi, 1e-10)
}

/// Common interference level `I0` (same units as `n0`) at each BS.
pub fn asymptotic_interference(
    c: f64,
    dist: &CompositeGainDist,
    params: &ChannelParams,
    n0: f64,
) -> Result<f64> {
    check_load(c)?;
    let load = 1.0 - mc_denominator(c, dist, params)?;
    if !(load < 1.0) {
        return Err(Error::LimitExceeded { c });
    }
    Ok(n0 * load / (1.0 - load))
}
