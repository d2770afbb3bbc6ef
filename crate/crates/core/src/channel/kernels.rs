//! Cross-cell path loss and the zeta-sum interference kernels.
//!
//! `phi(x)` sums the theta-averaged path gain from a user with own-cell gain
//! `x` to every other base station on the line. `phi0`/`phi1` split that sum
//! into even and odd cell distances for a spacing of 2.

use super::ChannelParams;
use crate::error::{Error, Result};
use crate::numerics::hurwitz_zeta;

/// Path gain to a BS `cell_offset` cells away. `toward == true` places the
/// user on the side facing that BS.
pub fn cross_cell_pathloss(s_own: f64, cell_offset: i64, toward: bool, params: &ChannelParams) -> f64 {
    let u = s_own.powf(-1.0 / params.alpha);
    let span = cell_offset.unsigned_abs() as f64 * params.d;
    let dist = if toward { span - u } else { span + u };
    dist.powf(-params.alpha)
}

/// `Phi(x, y) = ((y - x^(-1/alpha))^(-alpha) + (y + x^(-1/alpha))^(-alpha)) / 2`.
pub fn pair_kernel(x: f64, y: f64, alpha: f64) -> f64 {
    let u = x.powf(-1.0 / alpha);
    0.5 * ((y - u).powf(-alpha) + (y + u).powf(-alpha))
}

fn zeta_pair(alpha: f64, base: f64, shift: f64) -> Result<f64> {
    Ok(hurwitz_zeta(alpha, base - shift)? + hurwitz_zeta(alpha, base + shift)?)
}

/// Full-reuse kernel as a function of the user's distance `u` from its own BS.
pub fn phi_at_distance(u: f64, params: &ChannelParams) -> Result<f64> {
    let q = u / params.d;
    if !(q < 1.0) {
        return Err(Error::Domain(format!("phi kernel needs u/D < 1, got {q}")));
    }
    Ok(params.d.powf(-params.alpha) * zeta_pair(params.alpha, 1.0, q)?)
}

/// `Phi(x) = D^-alpha [zeta(alpha, 1 - x^(-1/alpha)/D) + zeta(alpha, 1 + x^(-1/alpha)/D)]`.
pub fn phi_kernel(x: f64, params: &ChannelParams) -> Result<f64> {
    phi_at_distance(x.powf(-1.0 / params.alpha), params)
}

/// Even-cell part of the kernel at spacing 2 (interferers 4, 8, 12, ... away).
pub fn phi0_at_distance(u: f64, alpha: f64) -> Result<f64> {
    let q = u / 4.0;
    if !(q < 1.0) {
        return Err(Error::Domain(format!("phi0 kernel needs u/4 < 1, got {q}")));
    }
    Ok(4f64.powf(-alpha) * zeta_pair(alpha, 1.0, q)?)
}

/// Odd-cell part of the kernel at spacing 2 (interferers 2, 6, 10, ... away).
pub fn phi1_at_distance(u: f64, alpha: f64) -> Result<f64> {
    let q = u / 4.0;
    if !(q < 0.5) {
        return Err(Error::Domain(format!("phi1 kernel needs u/4 < 1/2, got {q}")));
    }
    Ok(4f64.powf(-alpha) * zeta_pair(alpha, 0.5, q)?)
}

pub fn phi0_kernel(x: f64, alpha: f64) -> Result<f64> {
    phi0_at_distance(x.powf(-1.0 / alpha), alpha)
}

pub fn phi1_kernel(x: f64, alpha: f64) -> Result<f64> {
    phi1_at_distance(x.powf(-1.0 / alpha), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params() -> ChannelParams {
        ChannelParams::default()
    }

    /// `2 sum_{j in js} Phi(x, spacing * j)` plus an integral tail estimate.
    fn series(x: f64, alpha: f64, first: usize, step: usize, spacing: f64, terms: usize) -> f64 {
        let mut s = 0.0;
        let mut last = first;
        for i in (0..terms).rev() {
            let j = first + i * step;
            last = last.max(j);
            s += pair_kernel(x, spacing * j as f64, alpha);
        }
        // remainder ~ (2/(step spacing)) int_{(last + step/2) spacing}^inf t^-alpha dt
        let start = (last as f64 + 0.5 * step as f64) * spacing;
        let tail = start.powf(1.0 - alpha) / ((alpha - 1.0) * step as f64 * spacing);
        2.0 * (s + tail)
    }

    #[test]
    fn cross_cell_examples() {
        let p = params();
        assert!((cross_cell_pathloss(1.0, 1, true, &p) - 1.0).abs() < 1e-15);
        assert!((cross_cell_pathloss(1.0, 1, false, &p) - 1.0 / 9.0).abs() < 1e-15);
        assert!((cross_cell_pathloss(4.0, 2, true, &p) - 3.5f64.powi(-2)).abs() < 1e-15);
        assert!((cross_cell_pathloss(4.0, -2, true, &p) - 0.081633).abs() < 1e-6);
    }

    #[test]
    fn phi_limits_and_values() {
        let p = params();
        let far = phi_kernel(1e16, &p).unwrap();
        assert!((far - 2.0 * PI * PI / 6.0 / 4.0).abs() < 1e-7);
        assert!((far - 0.822467).abs() < 1e-6);
        let at_edge = phi_kernel(1.0, &p).unwrap();
        assert!((at_edge - (PI * PI - 4.0) / 4.0).abs() < 1e-12);
        assert!((at_edge - 1.467401).abs() < 1e-6);
    }

    #[test]
    fn phi_domain_error() {
        let p = params();
        // u = x^-1/2 = 2 = D
        assert!(phi_kernel(0.25, &p).is_err());
        assert!(phi1_kernel(0.25, 2.0).is_err());
    }

    #[test]
    fn phi_matches_direct_series() {
        let p = params();
        for &x in &[1.0, 2.0, 10.0, 1e3, 1e4] {
            let direct = series(x, 2.0, 1, 1, p.d, 1_000_000);
            let closed = phi_kernel(x, &p).unwrap();
            assert!((direct - closed).abs() < 1e-8, "x={x}: {direct} vs {closed}");
        }
        let p3 = ChannelParams { alpha: 3.0, ..p };
        for &x in &[1.0, 30.0] {
            let direct = series(x, 3.0, 1, 1, p3.d, 1_000_000);
            assert!((direct - phi_kernel(x, &p3).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn phi0_phi1_match_series() {
        for &x in &[1.0, 3.0, 100.0, 1e4] {
            let even = series(x, 2.0, 2, 2, 2.0, 1_000_000);
            let odd = series(x, 2.0, 1, 2, 2.0, 1_000_000);
            assert!((even - phi0_kernel(x, 2.0).unwrap()).abs() < 1e-8);
            assert!((odd - phi1_kernel(x, 2.0).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn even_plus_odd_is_full() {
        let p = params();
        for i in 0..20 {
            let x = 10f64.powf(4.0 * i as f64 / 19.0);
            let sum = phi0_kernel(x, 2.0).unwrap() + phi1_kernel(x, 2.0).unwrap();
            assert!((sum - phi_kernel(x, &p).unwrap()).abs() < 1e-10);
        }
        let p3 = ChannelParams { alpha: 3.5, ..p };
        let x = 5.0;
        let sum = phi0_kernel(x, 3.5).unwrap() + phi1_kernel(x, 3.5).unwrap();
        assert!((sum - phi_kernel(x, &p3).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn phi_grows_toward_cell_edge() {
        let p = params();
        let mut prev = 0.0;
        for i in 0..=40 {
            let x = 10f64.powf(4.0 - 4.0 * i as f64 / 40.0); // decreasing gain
            let v = phi_kernel(x, &p).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }
}
