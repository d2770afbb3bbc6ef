//! Path loss, fading, and the composite gain distribution.
//!
//! Users sit at distance `u` from their own base station, uniform on an
//! annulus `(a, b)`, with path gain `s = u^(-alpha)`. Each of the `M`
//! subchannels fades independently with unit-mean exponential power. Every
//! integral over the composite gain `s * max_m f^m` is evaluated in
//! `(u, y)` coordinates, `y` being the fading peak, so the cdf of the composite
//! gain never has to be differentiated.

mod kernels;
mod lemma;
mod sampling;
mod table;

pub use kernels::{
    cross_cell_pathloss, pair_kernel, phi0_at_distance, phi0_kernel, phi1_at_distance,
    phi1_kernel, phi_at_distance, phi_kernel,
};
pub use lemma::{lemma1_empirical, lemma1_target, lemma2_empirical, lemma2_target, RateFactors};
pub use sampling::{sample_fading_peak, sample_interferer_gain, InterfererGainSample};

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use table::GainCdfTable;

use crate::error::{Error, Result};
use crate::numerics::{try_integrate_1d, try_integrate_nested, QuadratureSpec};

/// Survival probability below which the fading-peak tail is dropped.
const FADING_TAIL: f64 = 1e-12;

/// Geometry and propagation constants of the linear cell array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Path-loss exponent.
    pub alpha: f64,
    /// Inter-BS spacing; the cell radius is `d / 2`.
    pub d: f64,
    /// Radius of the forbidden region around each BS.
    pub delta: f64,
    /// Number of parallel subchannels.
    pub m: usize,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self { alpha: 2.0, d: 2.0, delta: 0.01, m: 10 }
    }
}

impl ChannelParams {
    pub fn new(alpha: f64, d: f64, delta: f64, m: usize) -> Result<Self> {
        let p = Self { alpha, d, delta, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParams(format!("alpha must exceed 1, got {}", self.alpha)));
        }
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(Error::InvalidParams(format!("D must be positive, got {}", self.d)));
        }
        if !(self.delta > 0.0 && self.delta < self.radius()) {
            return Err(Error::InvalidParams(format!(
                "delta must lie in (0, r) = (0, {}), got {}",
                self.radius(),
                self.delta
            )));
        }
        if self.m < 1 {
            return Err(Error::InvalidParams("M must be at least 1".into()));
        }
        Ok(())
    }

    /// Delay-limited formulas need `M >= 2`: with one subchannel the mean of
    /// the inverse gain diverges and the required energy is infinite.
    pub fn require_delay_limited(&self) -> Result<()> {
        self.validate()?;
        if self.m < 2 {
            return Err(Error::InvalidParams(
                "delay-limited evaluation requires M >= 2 (E[1/gain] diverges for M = 1)".into(),
            ));
        }
        Ok(())
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.d
    }

    pub fn with_subchannels(self, m: usize) -> Self {
        Self { m, ..self }
    }

    /// Users spread over the whole cell, `(delta, r)`.
    pub fn full_cell(&self) -> AnnulusSupport {
        AnnulusSupport { a: self.delta, b: self.radius() }
    }

    /// Smallest in-cell path gain, at the cell edge.
    pub fn min_gain(&self) -> f64 {
        self.radius().powf(-self.alpha)
    }
}

/// User distances uniform on `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSupport {
    pub a: f64,
    pub b: f64,
}

impl AnnulusSupport {
    pub fn new(a: f64, b: f64, params: &ChannelParams) -> Result<Self> {
        let eps = 1e-12 * params.radius();
        if !(a >= params.delta - eps && a < b && b <= params.radius() + eps) {
            return Err(Error::InvalidParams(format!(
                "annulus ({a}, {b}) must satisfy delta <= a < b <= r with delta = {}, r = {}",
                params.delta,
                params.radius()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

/// cdf of `s = u^(-alpha)` with `u` uniform on the annulus.
pub fn pathloss_cdf(x: f64, support: &AnnulusSupport, alpha: f64) -> f64 {
    if x < support.b.powf(-alpha) {
        0.0
    } else if x >= support.a.powf(-alpha) {
        1.0
    } else {
        1.0 - (x.powf(-1.0 / alpha) - support.a) / support.width()
    }
}

/// cdf of the peak of `m` independent unit-mean exponential fadings.
pub fn fading_peak_cdf(y: f64, m: usize) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    (-(-y).exp_m1()).powi(m as i32)
}

/// Density of the fading peak.
pub fn fading_peak_pdf(y: f64, m: usize) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    let e = (-y).exp();
    m as f64 * e * (-(-y).exp_m1()).powi(m as i32 - 1)
}

/// Point past which `1 - H_M(y) < FADING_TAIL`.
fn fading_tail_cutoff(m: usize) -> f64 {
    // 1 - (1 - e^-y)^m < t  <=>  e^-y < 1 - (1 - t)^(1/m)
    let per_draw = -((-FADING_TAIL).ln_1p() / m as f64).exp_m1();
    -per_draw.ln()
}

/// Distribution of the composite gain `s * max{f^1, ..., f^M}`.
#[derive(Debug, Clone)]
pub struct CompositeGainDist {
    pub support: AnnulusSupport,
    pub m: usize,
    pub alpha: f64,
    /// Tolerance for outer expectations; the cdf itself is evaluated 1000x tighter.
    pub spec: QuadratureSpec,
    y_max: f64,
    table: Arc<OnceLock<GainCdfTable>>,
}

impl PartialEq for CompositeGainDist {
    fn eq(&self, other: &Self) -> bool {
        self.support == other.support
            && self.m == other.m
            && self.alpha == other.alpha
            && self.spec == other.spec
    }
}

impl CompositeGainDist {
    pub fn new(params: &ChannelParams, support: AnnulusSupport) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            support,
            m: params.m,
            alpha: params.alpha,
            spec: QuadratureSpec::default(),
            y_max: fading_tail_cutoff(params.m),
            table: Arc::default(),
        })
    }

    /// Users over the whole cell, the `G_M` of the full-reuse formulas.
    pub fn full(params: &ChannelParams) -> Result<Self> {
        Self::new(params, params.full_cell())
    }

    pub fn with_spec(mut self, spec: QuadratureSpec) -> Self {
        self.spec = spec;
        self.table = Arc::default();
        self
    }

    /// Same support and exponent, different number of fading draws in the peak.
    pub fn with_peak_of(mut self, m: usize) -> Self {
        self.m = m;
        self.y_max = fading_tail_cutoff(m);
        self.table = Arc::default();
        self
    }

    pub fn fading_cutoff(&self) -> f64 {
        self.y_max
    }

    fn cdf_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.spec.abs_tol * 1e-3,
            rel_tol: self.spec.rel_tol * 1e-3,
            max_subdivisions: self.spec.max_subdivisions,
        }
    }

    /// `G(x) = (1/(b-a)) int_a^b H_M(x u^alpha) du`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Ok(0.0);
        }
        let AnnulusSupport { a, b } = self.support;
        if x * a.powf(self.alpha) >= self.y_max + 40.0 {
            return Ok(1.0);
        }
        let (alpha, m) = (self.alpha, self.m);
        let integral =
            try_integrate_1d(|u| Ok(fading_peak_cdf(x * u.powf(alpha), m)), a, b, &self.cdf_spec())?;
        Ok((integral / (b - a)).clamp(0.0, 1.0))
    }

    /// Interpolated [`cdf`](Self::cdf), accurate to about 1e-10. The table is
    /// built on first use and shared between clones.
    pub fn cdf_interp(&self, x: f64) -> Result<f64> {
        if let Some(t) = self.table.get() {
            return Ok(t.eval(x));
        }
        let built = GainCdfTable::build(self)?;
        Ok(self.table.get_or_init(|| built).eval(x))
    }

    /// `E[F(u, y)]` with `u ~ U(a, b)` and `y ~ H_M`, truncating the fading tail.
    pub fn expect<F>(&self, f: F) -> Result<f64>
    where
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let y_max = self.y_max;
        self.expect_on(|_| (0.0, y_max), f)
    }

    /// As [`expect`](Self::expect), with the fading-peak integral restricted
    /// to `y_range(u)` (clipped to the truncated support).
    pub fn expect_on<L, F>(&self, mut y_range: L, mut f: F) -> Result<f64>
    where
        L: FnMut(f64) -> (f64, f64),
        F: FnMut(f64, f64) -> Result<f64>,
    {
        let AnnulusSupport { a, b } = self.support;
        let (m, y_max) = (self.m, self.y_max);
        let total = try_integrate_nested(
            (a, b),
            |u| {
                let (lo, hi) = y_range(u);
                (lo.max(0.0), hi.min(y_max))
            },
            |u, y| {
                let w = fading_peak_pdf(y, m);
                if w == 0.0 {
                    return Ok(0.0);
                }
                Ok(w * f(u, y)?)
            },
            &self.spec,
        )?;
        Ok(total / (b - a))
    }

    /// `E[g(X)]` over the composite gain via the `(u, y)` representation.
    pub fn expect_gain<G>(&self, mut g: G) -> Result<f64>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        let alpha = self.alpha;
        self.expect(|u, y| g(u.powf(-alpha) * y))
    }
}
