//! Cubic Hermite table of the composite gain cdf in `t = ln x`.

use super::{fading_peak_cdf, CompositeGainDist};
use crate::error::Result;

/// Node spacing in `ln x`.
const STEP: f64 = 2.5e-3;
/// `G` below the first node is under this value.
const LOW_MASS: f64 = 1e-16;

#[derive(Debug, Clone)]
pub(super) struct GainCdfTable {
    t0: f64,
    inv_h: f64,
    g: Vec<f64>,
    /// `dG/dt` at the nodes.
    dg: Vec<f64>,
}

impl GainCdfTable {
    pub(super) fn build(dist: &CompositeGainDist) -> Result<Self> {
        let (a, b) = (dist.support.a, dist.support.b);
        let (alpha, m) = (dist.alpha, dist.m);
        // G(x) <= H_M(x b^alpha) <= (x b^alpha)^M
        let x_lo = LOW_MASS.powf(1.0 / m as f64) / b.powf(alpha);
        let x_hi = (dist.fading_cutoff() + 40.0) / a.powf(alpha);
        let (t0, t1) = (x_lo.ln(), x_hi.ln());
        let n = ((t1 - t0) / STEP).ceil() as usize + 1;
        let h = (t1 - t0) / (n - 1) as f64;
        let mut g = Vec::with_capacity(n);
        let mut dg = Vec::with_capacity(n);
        for i in 0..n {
            let x = (t0 + h * i as f64).exp();
            let gi = dist.cdf(x)?;
            // x G'(x) = -G/alpha + (b H(x b^a) - a H(x a^a)) / (alpha (b - a))
            let edge = b * fading_peak_cdf(x * b.powf(alpha), m) - a * fading_peak_cdf(x * a.powf(alpha), m);
            g.push(gi);
            dg.push((edge / (b - a) - gi) / alpha);
        }
        Ok(Self { t0, inv_h: 1.0 / h, g, dg })
    }

    pub(super) fn eval(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        let s = (x.ln() - self.t0) * self.inv_h;
        if s <= 0.0 {
            return 0.0;
        }
        let last = self.g.len() - 1;
        if s >= last as f64 {
            return 1.0;
        }
        let i = s as usize;
        let f = s - i as f64;
        let h = 1.0 / self.inv_h;
        let (f2, f3) = (f * f, f * f * f);
        let v = (2.0 * f3 - 3.0 * f2 + 1.0) * self.g[i]
            + (f3 - 2.0 * f2 + f) * h * self.dg[i]
            + (-2.0 * f3 + 3.0 * f2) * self.g[i + 1]
            + (f3 - f2) * h * self.dg[i + 1];
        v.clamp(0.0, 1.0)
    }
}
