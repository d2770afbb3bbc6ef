//! Proportional-interference model: out-of-cell interference equals `beta`
//! times the total received energy of a cell.

use std::fmt;

use serde::Serialize;

use crate::channel::{phi_at_distance, ChannelParams, CompositeGainDist};
use crate::error::{Error, Result};
use crate::hard_fairness::{interference_integral, sc_ebn0, sc_integral, OperatingPoint};
use crate::numerics::hurwitz_zeta;

/// Effective interference ratio at one spectral efficiency, with its bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaEstimate {
    pub beta: f64,
    pub c: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `sc / (1 - beta c sc)` with `sc = sc_ebn0(c)`.
pub fn simplified_mc_ebn0(c: f64, beta: f64, dist: &CompositeGainDist) -> Result<OperatingPoint> {
    if !(beta >= 0.0) {
        return Err(Error::Domain(format!("beta must be non-negative, got {beta}")));
    }
    let sc = sc_ebn0(c, dist)?;
    let den = 1.0 - beta * c * sc.ebn0_linear;
    if !(den > 0.0) {
        return Err(Error::LimitExceeded { c });
    }
    Ok(OperatingPoint::from_linear(c, sc.ebn0_linear / den))
}

/// The `beta` for which the simplified model reproduces the line-array result at `c`.
pub fn beta_effective(c: f64, dist: &CompositeGainDist, params: &ChannelParams) -> Result<BetaEstimate> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("spectral efficiency must be positive, got {c}")));
    }
    let k = interference_integral(c, dist, |u| phi_at_distance(u, params))?;
    let j = sc_integral(c, dist)?;
    let (lower, upper) = beta_bounds(params)?;
    Ok(BetaEstimate { beta: k / j, c, lower, upper })
}

/// Range of the interference kernel over the cell: users at the BS and at the cell edge.
pub fn beta_bounds(params: &ChannelParams) -> Result<(f64, f64)> {
    let (a, d) = (params.alpha, params.d);
    if !(a > 1.0) {
        return Err(Error::Domain(format!("alpha must exceed 1, got {a}")));
    }
    let scale = d.powf(-a);
    Ok((
        2.0 * scale * hurwitz_zeta(a, 1.0)?,
        scale * (hurwitz_zeta(a, 0.5)? + hurwitz_zeta(a, 1.5)?),
    ))
}

/// Maps a single-cell `Eb/N0` (linear) to the multi-cell one.
pub fn sc_to_mc(ebn0_sc: f64, beta: f64, c: f64) -> Result<f64> {
    let den = 1.0 - beta * c * ebn0_sc;
    if !(den > 0.0) {
        return Err(Error::Domain(format!(
            "forbidden region: beta * c * Eb/N0 = {} >= 1",
            beta * c * ebn0_sc
        )));
    }
    Ok(ebn0_sc / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    NoiseDominated,
    InterferenceDominated,
    Forbidden,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::NoiseDominated => "noise-dominated",
            Regime::InterferenceDominated => "interference-dominated",
            Regime::Forbidden => "forbidden",
        })
    }
}

/// Noise-dominated up to `1/(2 beta c)`, forbidden from `1/(beta c)` on.
pub fn classify_regime(ebn0_sc: f64, beta: f64, c: f64) -> Regime {
    let x = beta * c * ebn0_sc;
    if x >= 1.0 {
        Regime::Forbidden
    } else if x <= 0.5 {
        Regime::NoiseDominated
    } else {
        Regime::InterferenceDominated
    }
}
