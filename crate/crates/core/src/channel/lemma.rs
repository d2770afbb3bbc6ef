//! Finite-population estimators whose almost-sure limits drive the large-K
//! formulas, paired with their quadrature targets.
//!
//! Each estimator draws one cell of `K` users, assigns every user to the
//! subchannel where its fading peaks, and sums over the users that landed on
//! subchannel 0 with composite gain inside `interval`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::CompositeGainDist;
use crate::error::Result;

/// Distribution of the per-user rate allocation factors (unit mean).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateFactors {
    /// Uniform on `[0.5, 1.5]`.
    #[default]
    Uniform,
    /// Every user requests the same rate.
    Equal,
}

impl RateFactors {
    fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            RateFactors::Uniform => rng.gen_range(0.5..1.5),
            RateFactors::Equal => 1.0,
        }
    }
}

struct UserDraw {
    s: f64,
    peak: f64,
    on_first: bool,
}

fn draw_user<R: Rng + ?Sized>(rng: &mut R, dist: &CompositeGainDist) -> UserDraw {
    let u = rng.gen_range(dist.support.a..dist.support.b);
    let s = u.powf(-dist.alpha);
    let mut peak = f64::NEG_INFINITY;
    let mut best = 0;
    for m in 0..dist.m {
        let f: f64 = Exp1.sample(rng);
        if f > peak {
            peak = f;
            best = m;
        }
    }
    UserDraw { s, peak, on_first: best == 0 }
}

fn inside(x: f64, interval: (f64, f64)) -> bool {
    x >= interval.0 && x < interval.1
}

/// `(1/K) sum_{k in A(0)} g(s_k f_k^0) nu_k`, converging to `(1/M) int_A g dG_M`.
pub fn lemma1_empirical<G, R>(
    k: usize,
    mut g: G,
    interval: (f64, f64),
    dist: &CompositeGainDist,
    nu: RateFactors,
    rng: &mut R,
) -> f64
where
    G: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    let mut sum = 0.0;
    for _ in 0..k {
        let user = draw_user(rng, dist);
        let nu_k = nu.draw(rng);
        let x = user.s * user.peak;
        if user.on_first && inside(x, interval) {
            sum += g(x) * nu_k;
        }
    }
    sum / k as f64
}

/// `(1/M) int_A g(x) dG_M(x)`.
pub fn lemma1_target<G>(mut g: G, interval: (f64, f64), dist: &CompositeGainDist) -> Result<f64>
where
    G: FnMut(f64) -> f64,
{
    let alpha = dist.alpha;
    let v = dist.expect_on(
        |u| {
            let ua = u.powf(alpha);
            (interval.0 * ua, interval.1 * ua)
        },
        |u, y| Ok(g(u.powf(-alpha) * y)),
    )?;
    Ok(v / dist.m as f64)
}

/// `(1/K) sum_{k in A(0)} g(s_k, theta_k) f_k(n,j) nu_k / (s_k f_k^0)`, converging to
/// `(1/M) iint_{xy in A} E_theta[g(x, theta)] / (x y) dF_s dH_M`.
pub fn lemma2_empirical<G, R>(
    k: usize,
    mut g: G,
    interval: (f64, f64),
    dist: &CompositeGainDist,
    nu: RateFactors,
    rng: &mut R,
) -> f64
where
    G: FnMut(f64, bool) -> f64,
    R: Rng + ?Sized,
{
    let mut sum = 0.0;
    for _ in 0..k {
        let user = draw_user(rng, dist);
        let nu_k = nu.draw(rng);
        let theta = rng.gen_bool(0.5);
        let cross: f64 = Exp1.sample(rng);
        let x = user.s * user.peak;
        if user.on_first && inside(x, interval) {
            sum += g(user.s, theta) * cross * nu_k / x;
        }
    }
    sum / k as f64
}

pub fn lemma2_target<G>(mut g: G, interval: (f64, f64), dist: &CompositeGainDist) -> Result<f64>
where
    G: FnMut(f64, bool) -> f64,
{
    let alpha = dist.alpha;
    let v = dist.expect_on(
        |u| {
            let ua = u.powf(alpha);
            (interval.0 * ua, interval.1 * ua)
        },
        |u, y| {
            let s = u.powf(-alpha);
            Ok(0.5 * (g(s, false) + g(s, true)) / (s * y))
        },
    )?;
    Ok(v / dist.m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{cross_cell_pathloss, ChannelParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dist() -> (ChannelParams, CompositeGainDist) {
        let p = ChannelParams::default();
        (p, CompositeGainDist::full(&p).unwrap())
    }

    fn mean_sd(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var.sqrt())
    }

    #[test]
    fn total_mass_splits_over_subchannels() {
        let (_, d) = dist();
        let target = lemma1_target(|_| 1.0, (0.0, f64::INFINITY), &d).unwrap();
        assert!((target - 0.1).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let est = lemma1_empirical(200_000, |_| 1.0, (0.0, f64::INFINITY), &d, RateFactors::Equal, &mut rng);
        assert!((est - 0.1).abs() < 4.0 * (0.09 / 200_000f64).sqrt());
    }

    #[test]
    fn zero_integrand() {
        let (_, d) = dist();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let est = lemma2_empirical(1000, |_, _| 0.0, (0.0, f64::INFINITY), &d, RateFactors::Uniform, &mut rng);
        assert_eq!(est, 0.0);
        assert_eq!(lemma2_target(|_, _| 0.0, (0.0, f64::INFINITY), &d).unwrap(), 0.0);
    }

    #[test]
    fn lemma1_inverse_gain_window() {
        let (_, d) = dist();
        let target = lemma1_target(|x| 1.0 / x, (0.1, 10.0), &d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let reps: Vec<f64> = (0..30)
            .map(|_| lemma1_empirical(100_000, |x| 1.0 / x, (0.1, 10.0), &d, RateFactors::Uniform, &mut rng))
            .collect();
        let (mean, sd) = mean_sd(&reps);
        assert!((mean - target).abs() < 3.0 * sd / (reps.len() as f64).sqrt(), "{mean} vs {target}");
    }

    #[test]
    fn lemma2_cross_cell_kernel() {
        let (p, d) = dist();
        let g = |s: f64, theta: bool| cross_cell_pathloss(s, 1, theta, &p);
        let target = lemma2_target(g, (0.0, f64::INFINITY), &d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for nu in [RateFactors::Uniform, RateFactors::Equal] {
            let reps: Vec<f64> = (0..30)
                .map(|_| lemma2_empirical(100_000, g, (0.0, f64::INFINITY), &d, nu, &mut rng))
                .collect();
            let (mean, sd) = mean_sd(&reps);
            assert!((mean - target).abs() < 3.0 * sd / 30f64.sqrt(), "{nu:?}: {mean} vs {target}");
        }
    }

    #[test]
    fn lemma2_constant_matches_double_integral() {
        let (_, d) = dist();
        let c = 2.5;
        let target = lemma2_target(|_, _| c, (0.0, f64::INFINITY), &d).unwrap();
        // independent oracle: c/M * E[u^alpha] * E[1/y], each as a 1-d integral
        let spec = crate::numerics::QuadratureSpec::default();
        let eu = crate::numerics::integrate_1d(|u| u * u, 0.01, 1.0, &spec).unwrap() / 0.99;
        let ey = crate::numerics::integrate_1d(
            |y| crate::channel::fading_peak_pdf(y, 10) / y,
            0.0,
            f64::INFINITY,
            &spec,
        )
        .unwrap();
        assert!((target - c / 10.0 * eu * ey).abs() < 1e-8 * target);
    }
}
