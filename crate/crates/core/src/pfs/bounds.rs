//! Analytic and sampled envelopes for the proportional-fair spectral efficiency.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{sample_fading_peak, ChannelParams, CompositeGainDist, InterfererGainSample};
use crate::error::{Error, Result};
use crate::hard_fairness::ring_offset;
use crate::numerics::shifted_pair_difference;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    pub(crate) fn from_moments(sum: f64, sum_sq: f64, n: usize) -> Self {
        let mean = sum / n as f64;
        let var = if n > 1 { ((sum_sq - sum * mean) / (n - 1) as f64).max(0.0) } else { 0.0 };
        Self { mean, std_error: (var / n as f64).sqrt(), samples: n }
    }
}

fn prefactor(params: &ChannelParams) -> f64 {
    let a = params.alpha;
    params.d.powf(1.0 - a) / ((a - 1.0) * (params.radius() - params.delta))
}

/// Mean total interference at a BS from one user per other cell on the
/// infinite line, users uniform over their cell and unit-mean fading.
pub fn average_interference(params: &ChannelParams) -> Result<f64> {
    params.validate()?;
    let (a, d, delta) = (params.alpha, params.d, params.delta);
    if a == 2.0 {
        let x = std::f64::consts::PI * delta / d;
        return Ok((2.0 - d / delta + std::f64::consts::PI / x.tan()) / (d * (params.radius() - delta)));
    }
    // zeta(a-1, 1+x) - zeta(a-1, 1-x), also valid when a - 1 <= 1
    let diff = shifted_pair_difference(a - 1.0, delta / d)?;
    Ok(prefactor(params) * (2f64.powf(a - 1.0) + diff))
}

/// As [`average_interference`], keeping only the two adjacent cells.
pub fn two_cell_average_interference(params: &ChannelParams) -> Result<f64> {
    params.validate()?;
    let (a, x) = (params.alpha, params.delta / params.d);
    let e = 1.0 - a;
    Ok(prefactor(params) * (2f64.powf(a - 1.0) - (2.0 / 3.0f64).powf(a - 1.0) + (1.0 + x).powf(e) - (1.0 - x).powf(e)))
}

fn check_inputs(rho: f64, k: usize) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    if k == 0 {
        return Err(Error::InvalidParams("K must be at least 1".into()));
    }
    Ok(())
}

/// `E[log2(1 + rho s max_k f_k / (1 + rho I0))]`: interference replaced by its mean.
pub fn lower_bound(rho: f64, k: usize, params: &ChannelParams) -> Result<f64> {
    check_inputs(rho, k)?;
    let i0 = average_interference(params)?;
    let dist = CompositeGainDist::full(params)?.with_peak_of(k);
    let (alpha, scale) = (params.alpha, rho / (1.0 + rho * i0));
    dist.expect(|u, y| Ok((scale * u.powf(-alpha) * y).ln_1p() / std::f64::consts::LN_2))
}

/// Two-nearest-cell upper bound. The first term is by quadrature, the
/// subtracted interference term by `mc_samples` draws; the returned standard
/// error is that of the sampled term.
pub fn upper_bound(rho: f64, k: usize, params: &ChannelParams, mc_samples: usize, seed: u64) -> Result<McEstimate> {
    check_inputs(rho, k)?;
    if mc_samples < 2 {
        return Err(Error::InvalidParams("need at least 2 samples".into()));
    }
    let i2 = two_cell_average_interference(params)?;
    let dist = CompositeGainDist::full(params)?.with_peak_of(k);
    let alpha = params.alpha;
    let first = dist.expect(|u, y| Ok((rho * (u.powf(-alpha) * y + i2)).ln_1p() / std::f64::consts::LN_2))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..mc_samples {
        let g = InterfererGainSample::draw(&mut rng, -1, params).gain(params)
            + InterfererGainSample::draw(&mut rng, 1, params).gain(params);
        let v = (rho * g).ln_1p() / std::f64::consts::LN_2;
        s += v;
        s2 += v * v;
    }
    let second = McEstimate::from_moments(s, s2, mc_samples);
    Ok(McEstimate { mean: first - second.mean, ..second })
}

/// High-SNR limit `E[log2(1 + s max_k f_k / I)]` on a ring of `n_cells`,
/// with `I` summed over one fading-argmax user per other cell.
pub fn pfs_capacity_limit(
    k: usize,
    params: &ChannelParams,
    n_cells: usize,
    mc_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_inputs(1.0, k)?;
    params.validate()?;
    if n_cells < 2 || mc_samples < 2 {
        return Err(Error::InvalidParams("need at least 2 cells and 2 samples".into()));
    }
    let offsets: Vec<i64> = (1..n_cells).map(|j| ring_offset(0, j, n_cells)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..mc_samples {
        let u: f64 = rand::Rng::gen_range(&mut rng, params.delta..params.radius());
        let signal = u.powf(-params.alpha) * sample_fading_peak(&mut rng, k);
        let interference: f64 =
            offsets.iter().map(|&off| InterfererGainSample::draw(&mut rng, off, params).gain(params)).sum();
        let v = (signal / interference).ln_1p() / std::f64::consts::LN_2;
        s += v;
        s2 += v * v;
    }
    Ok(McEstimate::from_moments(s, s2, mc_samples))
}
