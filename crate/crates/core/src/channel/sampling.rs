use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::ChannelParams;

/// One draw of an out-of-cell interferer as seen by a BS `cell_offset` cells away.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfererGainSample {
    /// `true` when the user sits on the side facing the receiving BS.
    pub theta: bool,
    /// Distance from the user's own BS, uniform on `(delta, r)`.
    pub u: f64,
    /// Unit-mean exponential fading on the cross link.
    pub f: f64,
    pub cell_offset: i64,
}

impl InterfererGainSample {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, cell_offset: i64, params: &ChannelParams) -> Self {
        assert!(cell_offset != 0, "interferer must sit in another cell");
        let theta = rng.gen_bool(0.5);
        let u = rng.gen_range(params.delta..params.radius());
        let f = Exp1.sample(rng);
        Self { theta, u, f, cell_offset }
    }

    pub fn gain(&self, params: &ChannelParams) -> f64 {
        let span = self.cell_offset.unsigned_abs() as f64 * params.d;
        let dist = if self.theta { span - self.u } else { span + self.u };
        dist.powf(-params.alpha) * self.f
    }
}

/// Received power at a BS from a randomly placed user `cell_offset` cells away.
pub fn sample_interferer_gain<R: Rng + ?Sized>(
    rng: &mut R,
    cell_offset: i64,
    params: &ChannelParams,
) -> f64 {
    InterfererGainSample::draw(rng, cell_offset, params).gain(params)
}

/// Peak of `m` unit-mean exponentials by inversion of `(1 - e^-y)^m`.
pub fn sample_fading_peak<R: Rng + ?Sized>(rng: &mut R, m: usize) -> f64 {
    let v: f64 = rng.gen();
    // y = -ln(1 - v^(1/m))
    -(-(v.ln() / m as f64).exp_m1()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_1d, QuadratureSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mean_interferer_gain_matches_integral() {
        let p = ChannelParams::default();
        // frozen oracle: (1/2)(1/(r - delta)) int_delta^r (2-u)^-2 + (2+u)^-2 du
        let oracle = 0.5
            * integrate_1d(
                |u| (2.0 - u).powi(-2) + (2.0 + u).powi(-2),
                p.delta,
                1.0,
                &QuadratureSpec::default(),
            )
            .unwrap()
            / (1.0 - p.delta);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 2_000_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_interferer_gain(&mut rng, 1, &p)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - oracle).abs() < 4.0 * (var / n as f64).sqrt(), "{mean} vs {oracle}");
        assert!((oracle - 0.334175).abs() < 1e-5);
    }

    #[test]
    fn forced_fields() {
        let p = ChannelParams::default();
        let zero = InterfererGainSample { theta: true, u: 0.3, f: 0.0, cell_offset: 1 };
        assert_eq!(zero.gain(&p), 0.0);
        let near = InterfererGainSample { theta: true, u: p.delta, f: 1.7, cell_offset: 1 };
        assert!((near.gain(&p) - (p.d - p.delta).powf(-p.alpha) * 1.7).abs() < 1e-15);
    }

    #[test]
    fn peak_sampler_matches_cdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let hits = (0..n).filter(|_| sample_fading_peak(&mut rng, 10) <= 2.5).count();
        let target = super::super::fading_peak_cdf(2.5, 10);
        let se = (target * (1.0 - target) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - target).abs() < 4.0 * se);
    }
}
