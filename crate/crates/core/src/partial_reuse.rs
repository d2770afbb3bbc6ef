//! Partial frequency reuse on the line with cell spacing 2.
//!
//! Time is split in two phases. In the phase shown here even cells serve all
//! their users while odd cells serve only users within `r0` of their BS; the
//! roles swap in the other phase. Outer-zone users are therefore active half
//! the time and receive half of their requested rate.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{phi0_at_distance, phi1_at_distance, AnnulusSupport, ChannelParams, CompositeGainDist};
use crate::error::{Error, Result};
use crate::hard_fairness::{interference_integral, sc_integral, OperatingPoint};
use crate::numerics::{from_db, linspace, solve_2x2};

/// Fraction of the requested rate delivered to users outside the reuse radius.
pub const OUTER_ZONE_RATE_FRACTION: f64 = 0.5;

/// Note attached to every partial-reuse output.
pub const DUTY_CYCLE_NOTE: &str =
    "users outside the reuse radius are served in one phase of two and receive half their requested rate";

/// Cell spacing for which the even/odd kernels are defined.
pub const REFERENCE_SPACING: f64 = 2.0;

/// Result of mapping a geometry onto the reference spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellRescale {
    /// Original spacing over the reference spacing.
    pub lambda: f64,
    /// Same geometry with `D = 2` and `delta / lambda`.
    pub normalized: ChannelParams,
    /// Add to `Eb/N0` in dB computed for `normalized` to get the original geometry.
    pub ebn0_shift_db: f64,
}

/// Scaling all distances by `lambda` scales every path gain by `lambda^-alpha`.
pub fn rescale_to_reference(params: &ChannelParams) -> Result<CellRescale> {
    params.validate()?;
    let lambda = params.d / REFERENCE_SPACING;
    let normalized = ChannelParams { d: REFERENCE_SPACING, delta: params.delta / lambda, ..*params };
    normalized.validate()?;
    Ok(CellRescale { lambda, normalized, ebn0_shift_db: 10.0 * params.alpha * lambda.log10() })
}

/// System spectral efficiency for `gamma0` bits per even cell per active phase.
pub fn partial_spectral_efficiency(gamma0: f64, r0: f64, params: &ChannelParams) -> Result<f64> {
    check_r0(r0, params)?;
    if !(gamma0 > 0.0) {
        return Err(Error::Domain(format!("gamma0 must be positive, got {gamma0}")));
    }
    let delta = params.delta;
    Ok(gamma0 / (2.0 * params.m as f64) * (1.0 + r0 - 2.0 * delta) / (1.0 - delta))
}

fn check_r0(r0: f64, params: &ChannelParams) -> Result<()> {
    if !(r0 >= params.delta && r0 <= params.radius()) {
        return Err(Error::Domain(format!(
            "reuse radius {r0} outside [{}, {}]",
            params.delta,
            params.radius()
        )));
    }
    Ok(())
}

fn check_reference(params: &ChannelParams) -> Result<()> {
    if params.d != REFERENCE_SPACING {
        return Err(Error::InvalidParams(format!(
            "partial reuse is evaluated at D = 2 (got {}); use rescale_to_reference",
            params.d
        )));
    }
    params.require_delay_limited()
}

/// Per-subchannel loads `(c0, c1)` in bit/s/Hz of even and odd cells in the
/// active phase, and the share of each cell type in the per-bit average.
fn phase_loads(c: f64, r0: f64, delta: f64) -> ((f64, f64), (f64, f64)) {
    let norm = 1.0 + r0 - 2.0 * delta;
    let (w0, w1) = ((1.0 - delta) / norm, (r0 - delta) / norm);
    ((2.0 * c * w0, 2.0 * c * w1), (w0, w1))
}

/// `A[i][j]`: interference at a type-`i` BS from type-`j` cells per unit
/// received power, `0` = even (all users), `1` = odd (users within `r0`).
pub fn aij_coefficients(
    c: f64,
    r0: f64,
    dist_full: &CompositeGainDist,
    dist_inner: Option<&CompositeGainDist>,
    params: &ChannelParams,
) -> Result<[[f64; 2]; 2]> {
    check_reference(params)?;
    check_r0(r0, params)?;
    let alpha = params.alpha;
    let ((c0, c1), _) = phase_loads(c, r0, params.delta);
    let ln2 = std::f64::consts::LN_2;
    let a00 = ln2 * c0 * interference_integral(c0, dist_full, |u| phi0_at_distance(u, alpha))?;
    let a10 = ln2 * c0 * interference_integral(c0, dist_full, |u| phi1_at_distance(u, alpha))?;
    let (a01, a11) = match dist_inner {
        Some(inner) if r0 > params.delta => (
            ln2 * c1 * interference_integral(c1, inner, |u| phi1_at_distance(u, alpha))?,
            ln2 * c1 * interference_integral(c1, inner, |u| phi0_at_distance(u, alpha))?,
        ),
        _ => (0.0, 0.0),
    };
    Ok([[a00, a01], [a10, a11]])
}

/// Solves `(I - A) i = A 1` for the normalized interference `(i0, i1)`.
pub fn interference_pair(a: [[f64; 2]; 2], c: f64) -> Result<(f64, f64)> {
    let det = (1.0 - a[0][0]) * (1.0 - a[1][1]) - a[0][1] * a[1][0];
    if !(det > 0.0) {
        return Err(Error::LimitExceeded { c });
    }
    let [i0, i1] = solve_2x2(
        [[1.0 - a[0][0], -a[0][1]], [-a[1][0], 1.0 - a[1][1]]],
        [a[0][0] + a[0][1], a[1][0] + a[1][1]],
    )
    .map_err(|_| Error::LimitExceeded { c })?;
    if !(i0 >= 0.0 && i1 >= 0.0) {
        return Err(Error::LimitExceeded { c });
    }
    Ok((i0, i1))
}

/// Everything computed for one `(c, r0)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialReuseState {
    pub r0: f64,
    /// Bits per even / odd cell per active phase.
    pub gamma0: f64,
    pub gamma1: f64,
    pub a_matrix: [[f64; 2]; 2],
    /// Interference at even / odd BSs in units of `N0`.
    pub i0: f64,
    pub i1: f64,
    pub point: OperatingPoint,
}

/// Partial-reuse evaluator for one geometry, with the full-cell distribution
/// (and its cdf table) built once.
#[derive(Debug, Clone)]
pub struct PartialReuseModel {
    params: ChannelParams,
    rescale: CellRescale,
    full: CompositeGainDist,
}

/// Optimal reuse radius at one spectral efficiency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct R0Optimum {
    pub r0: f64,
    pub state: PartialReuseState,
    /// `Eb/N0` in dB at `r0 = delta` and `r0 = 1`; `None` where infeasible.
    pub reuse2_db: Option<f64>,
    pub full_reuse_db: Option<f64>,
}

const COARSE_GRID: usize = 64;
const GOLDEN_TOL: f64 = 1e-6;

impl PartialReuseModel {
    /// Accepts any spacing; results are reported for the original geometry.
    pub fn new(params: &ChannelParams) -> Result<Self> {
        params.require_delay_limited()?;
        let rescale = rescale_to_reference(params)?;
        let full = CompositeGainDist::full(&rescale.normalized)?;
        Ok(Self { params: *params, rescale, full })
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn rescale(&self) -> &CellRescale {
        &self.rescale
    }

    /// Reuse radius in the normalized geometry.
    fn norm_r0(&self, r0: f64) -> Result<f64> {
        check_r0(r0, &self.params)?;
        Ok((r0 / self.rescale.lambda).clamp(self.rescale.normalized.delta, 1.0))
    }

    pub fn state(&self, c: f64, r0: f64) -> Result<PartialReuseState> {
        if !(c > 0.0) {
            return Err(Error::Domain(format!("spectral efficiency must be positive, got {c}")));
        }
        let np = self.rescale.normalized;
        let nr0 = self.norm_r0(r0)?;
        let inner = if nr0 > np.delta {
            Some(CompositeGainDist::new(&np, AnnulusSupport::new(np.delta, nr0, &np)?)?)
        } else {
            None
        };
        let a = aij_coefficients(c, nr0, &self.full, inner.as_ref(), &np)?;
        let (i0, i1) = interference_pair(a, c)?;
        let ((c0, c1), (w0, w1)) = phase_loads(c, nr0, np.delta);
        let ln2 = std::f64::consts::LN_2;
        let mut ebn0 = w0 * (1.0 + i0) * ln2 * sc_integral(c0, &self.full)?;
        if let Some(inner) = &inner {
            ebn0 += w1 * (1.0 + i1) * ln2 * sc_integral(c1, inner)?;
        }
        let mut point = OperatingPoint::from_linear(c, ebn0);
        point.ebn0_db += self.rescale.ebn0_shift_db;
        point.ebn0_linear = from_db(point.ebn0_db);
        let m = np.m as f64;
        Ok(PartialReuseState { r0, gamma0: c0 * m, gamma1: c1 * m, a_matrix: a, i0, i1, point })
    }

    pub fn ebn0(&self, c: f64, r0: f64) -> Result<OperatingPoint> {
        Ok(self.state(c, r0)?.point)
    }

    /// `Eb/N0` in dB, `+inf` past the feasibility limit.
    fn objective(&self, c: f64, r0: f64) -> Result<f64> {
        match self.ebn0(c, r0) {
            Ok(p) => Ok(p.ebn0_db),
            Err(Error::LimitExceeded { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }

    /// Coarse grid over `[delta, 1]` followed by golden-section refinement
    /// around the best grid point.
    pub fn optimize_r0(&self, c: f64) -> Result<R0Optimum> {
        let (lo, hi) = (self.params.delta, self.params.radius());
        let grid = linspace(lo, hi, COARSE_GRID);
        let values: Vec<f64> =
            grid.par_iter().map(|&r| self.objective(c, r)).collect::<Result<Vec<_>>>()?;
        let best = (0..grid.len())
            .min_by(|&i, &j| values[i].total_cmp(&values[j]))
            .expect("non-empty grid");
        if values[best].is_infinite() {
            return Err(Error::LimitExceeded { c });
        }
        let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(grid.len() - 1)]);
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let (mut f1, mut f2) = (self.objective(c, x1)?, self.objective(c, x2)?);
        while b - a > GOLDEN_TOL {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = self.objective(c, x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = self.objective(c, x2)?;
            }
        }
        let mut r0 = if f1 <= f2 { x1 } else { x2 };
        if values[best] < f1.min(f2) {
            r0 = grid[best];
        }
        let finite = |v: f64| v.is_finite().then_some(v);
        Ok(R0Optimum {
            r0,
            state: self.state(c, r0)?,
            reuse2_db: finite(values[0]),
            full_reuse_db: finite(values[grid.len() - 1]),
        })
    }

    /// Largest `c` with a feasible interference pair at `r0`, by bisection on
    /// feasibility between `lo` and `hi`.
    pub fn spectral_efficiency_limit(&self, r0: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        let feasible = |c: f64| -> Result<bool> {
            match self.state(c, r0) {
                Ok(_) => Ok(true),
                Err(Error::LimitExceeded { .. }) => Ok(false),
                Err(e) => Err(e),
            }
        };
        if !feasible(lo)? || feasible(hi)? {
            return Err(Error::Bracket { lo, hi, f_lo: lo, f_hi: hi });
        }
        let (mut a, mut b) = (lo, hi);
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if feasible(mid)? {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(a)
    }
}

/// Partial-reuse system `Eb/N0` at spectral efficiency `c` and reuse radius `r0`.
pub fn partial_ebn0(c: f64, r0: f64, params: &ChannelParams) -> Result<OperatingPoint> {
    PartialReuseModel::new(params)?.ebn0(c, r0)
}

/// Minimizing reuse radius and its operating point.
pub fn optimize_r0(c: f64, params: &ChannelParams) -> Result<(f64, OperatingPoint)> {
    let opt = PartialReuseModel::new(params)?.optimize_r0(c)?;
    Ok((opt.r0, opt.state.point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hard_fairness::{mc_denominator, mc_ebn0};

    fn model() -> PartialReuseModel {
        PartialReuseModel::new(&ChannelParams::default()).unwrap()
    }

    #[test]
    fn spectral_efficiency_examples() {
        let p = ChannelParams::default();
        assert!((partial_spectral_efficiency(20.0, 1.0, &p).unwrap() - 2.0).abs() < 1e-15);
        assert!((partial_spectral_efficiency(20.0, p.delta, &p).unwrap() - 1.0).abs() < 1e-15);
        let c = partial_spectral_efficiency(20.0, 0.5, &p).unwrap();
        assert!((c - 1.48 / 0.99).abs() < 1e-12 && (c - 1.49495).abs() < 1e-5);
        assert!(partial_spectral_efficiency(20.0, 1.2, &p).is_err());
    }

    #[test]
    fn loads_match_bookkeeping() {
        let p = ChannelParams::default();
        let ((c0, c1), _) = phase_loads(1.49495, 0.5, p.delta);
        assert!((c0 * 10.0 - 20.0).abs() < 1e-3);
        assert!((c1 / c0 - 0.49 / 0.99).abs() < 1e-12);
    }

    #[test]
    fn full_reuse_partition_identity() {
        let p = ChannelParams::default();
        let d = CompositeGainDist::full(&p).unwrap();
        let c = 2.0;
        let a = aij_coefficients(c, 1.0, &d, Some(&d), &p).unwrap();
        let full = 1.0 - mc_denominator(c, &d, &p).unwrap();
        assert!((a[0][0] + a[0][1] - full).abs() < 1e-9);
        assert!((a[0][0] - a[1][1]).abs() < 1e-12 && (a[0][1] - a[1][0]).abs() < 1e-12);
    }

    #[test]
    fn full_reuse_matches_line_array() {
        let m = model();
        let p = ChannelParams::default();
        let d = CompositeGainDist::full(&p).unwrap();
        let s = m.state(2.8, 1.0).unwrap();
        assert!((s.i0 - s.i1).abs() < 1e-9 * s.i0);
        let mc = mc_ebn0(2.8, &d, &p).unwrap().ebn0_linear;
        assert!((s.point.ebn0_linear / mc - 1.0).abs() < 1e-6);
    }

    #[test]
    fn low_load_vanishes() {
        let p = ChannelParams::default();
        let d = CompositeGainDist::full(&p).unwrap();
        let inner = CompositeGainDist::new(&p, AnnulusSupport::new(p.delta, 0.5, &p).unwrap()).unwrap();
        let a = aij_coefficients(1e-6, 0.5, &d, Some(&inner), &p).unwrap();
        assert!(a.iter().flatten().all(|&v| v >= 0.0 && v < 1e-5));
        let (i0, i1) = interference_pair(a, 1e-6).unwrap();
        assert!(i0 < 1e-5 && i1 < 1e-5);
    }

    #[test]
    fn pair_matches_iteration() {
        let m = model();
        let s = m.state(2.0, 0.5).unwrap();
        let a = s.a_matrix;
        let (mut x, mut y) = (0.0f64, 0.0f64);
        for _ in 0..10_000 {
            let nx = a[0][0] * (1.0 + x) + a[0][1] * (1.0 + y);
            let ny = a[1][0] * (1.0 + x) + a[1][1] * (1.0 + y);
            let done = (nx - x).abs().max((ny - y).abs()) < 1e-15;
            x = nx;
            y = ny;
            if done {
                break;
            }
        }
        assert!((x - s.i0).abs() < 1e-9 && (y - s.i1).abs() < 1e-9);
    }

    #[test]
    fn singular_system_is_limit() {
        assert!(matches!(interference_pair([[0.6, 0.5], [0.5, 0.6]], 3.0), Err(Error::LimitExceeded { .. })));
    }

    #[test]
    fn reuse_two_limit_has_no_odd_load() {
        let m = model();
        let s = m.state(1.0, 0.01).unwrap();
        assert_eq!(s.a_matrix[0][1], 0.0);
        assert_eq!(s.a_matrix[1][1], 0.0);
        assert_eq!(s.gamma1, 0.0);
        let near = m.state(1.0, 0.01 + 1e-7).unwrap();
        assert!((near.point.ebn0_db - s.point.ebn0_db).abs() < 1e-3);
    }

    #[test]
    fn rescale_shifts_db() {
        let p4 = ChannelParams { d: 4.0, delta: 0.02, ..ChannelParams::default() };
        let r = rescale_to_reference(&p4).unwrap();
        assert_eq!(r.lambda, 2.0);
        assert!((r.normalized.delta - 0.01).abs() < 1e-15);
        assert!((r.ebn0_shift_db - 20.0 * 2f64.log10()).abs() < 1e-12);
        let big = PartialReuseModel::new(&p4).unwrap().ebn0(2.0, 2.0).unwrap();
        let base = model().ebn0(2.0, 1.0).unwrap();
        assert!((big.ebn0_db - base.ebn0_db - r.ebn0_shift_db).abs() < 1e-9);
        assert!(aij_coefficients(1.0, 1.0, &CompositeGainDist::full(&p4).unwrap(), None, &p4).is_err());
    }
}
