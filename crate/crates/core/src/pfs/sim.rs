//! Ring Monte Carlo of proportional-fair scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::hard_fairness::ring_offset;
use crate::numerics::to_db;

/// Initial long-term throughput of every user under the literal rule.
pub const INITIAL_THROUGHPUT: f64 = 1e-3;
/// Batches used for the standard error of a single trial.
const BATCHES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionRule {
    /// Serve the user at its own fading peak.
    AsymptoticMaxFading,
    /// Throughput-normalized rate with the previous slot's interference.
    LiteralPfs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PfsSimConfig {
    pub k: usize,
    /// Transmit SNR, linear.
    pub rho: f64,
    pub n_cells: usize,
    pub n_slots: usize,
    pub t_c: f64,
    pub burn_in: usize,
    pub seed: u64,
    pub rule: SelectionRule,
    pub m_sub: usize,
    /// Independent user placements, averaged.
    pub trials: usize,
}

impl PfsSimConfig {
    /// Defaults: 21 cells, 1e5 slots, `t_c = 1000`, 100 trials, one
    /// subchannel; burn-in `10 t_c` for the literal rule and none otherwise.
    pub fn new(k: usize, rho: f64, rule: SelectionRule) -> Self {
        let t_c = 1000.0;
        Self {
            k,
            rho,
            n_cells: 21,
            n_slots: 100_000,
            t_c,
            burn_in: default_burn_in(rule, t_c),
            seed: 0,
            rule,
            m_sub: 1,
            trials: 100,
        }
    }

    /// Sets `t_c` and the matching default burn-in.
    pub fn with_window(mut self, t_c: f64) -> Self {
        self.t_c = t_c;
        self.burn_in = default_burn_in(self.rule, t_c);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        if self.k == 0 {
            return bad("K must be at least 1");
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad("rho must be positive");
        }
        if self.n_cells < 5 || self.n_cells % 2 == 0 {
            return bad("ring size must be odd and at least 5");
        }
        if self.n_slots <= self.burn_in {
            return bad("slots must exceed burn-in");
        }
        if !(self.t_c >= 1.0) {
            return bad("t_c must be at least 1");
        }
        if self.m_sub == 0 || self.trials == 0 {
            return bad("need at least one subchannel and one trial");
        }
        Ok(())
    }

    pub fn slots_used(&self) -> usize {
        self.n_slots - self.burn_in
    }
}

fn default_burn_in(rule: SelectionRule, t_c: f64) -> usize {
    match rule {
        SelectionRule::LiteralPfs => (10.0 * t_c).ceil() as usize,
        SelectionRule::AsymptoticMaxFading => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PfsSimResult {
    pub rho: f64,
    /// Spectral efficiency, bit/s/Hz per cell.
    pub c_estimate: f64,
    pub std_error: f64,
    /// `rho / C` in dB.
    pub ebn0_db: f64,
    /// Same draws and selections with the interference removed.
    pub c_no_interference: f64,
    /// Throughput of the `k`-th user of a cell, averaged over cells and trials.
    pub per_user_throughput: Vec<f64>,
    /// Share of slots given to the `k`-th user, averaged over cells and trials.
    pub selection_fractions: Vec<f64>,
    pub slots_used: usize,
    pub trials: usize,
}

/// Serves the user at its fading peak; ties go to the lower index.
pub fn selection_asymptotic(fadings: &[f64]) -> usize {
    let mut best = 0;
    for (k, &f) in fadings.iter().enumerate().skip(1) {
        if f > fadings[best] {
            best = k;
        }
    }
    best
}

/// Argmax of `log2(1 + rho g_k / (1 + rho I)) / T_k`.
pub fn selection_literal_pfs(gains: &[f64], throughput: &[f64], rho: f64, interference: f64) -> usize {
    let scale = rho / (1.0 + rho * interference);
    let mut best = (0, f64::NEG_INFINITY);
    for (k, (&g, &t)) in gains.iter().zip(throughput).enumerate() {
        let metric = (scale * g).ln_1p() / t;
        if metric > best.1 {
            best = (k, metric);
        }
    }
    best.0
}

/// Exponential moving average update of the long-term throughputs.
pub fn update_throughput(throughput: &mut [f64], served: &[f64], t_c: f64) {
    let w = 1.0 / t_c;
    for (t, &r) in throughput.iter_mut().zip(served) {
        *t = (1.0 - w) * *t + w * r;
    }
}

struct Geometry {
    /// `own[j][k]`
    own: Vec<Vec<f64>>,
    /// `cross[n][j][k]`, zero on the diagonal.
    cross: Vec<Vec<Vec<f64>>>,
}

impl Geometry {
    fn draw(rng: &mut ChaCha8Rng, cfg: &PfsSimConfig, params: &ChannelParams) -> Self {
        let (n, k) = (cfg.n_cells, cfg.k);
        let mut own = vec![vec![0.0; k]; n];
        let mut cross = vec![vec![vec![0.0; k]; n]; n];
        for j in 0..n {
            for user in 0..k {
                let u: f64 = rng.gen_range(params.delta..params.radius());
                let side: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
                own[j][user] = u.powf(-params.alpha);
                for (bs, row) in cross.iter_mut().enumerate() {
                    if bs == j {
                        continue;
                    }
                    let off = ring_offset(j, bs, n);
                    let span = off.unsigned_abs() as f64 * params.d;
                    let dist = if off.signum() == side { span - u } else { span + u };
                    row[j][user] = dist.powf(-params.alpha);
                }
            }
        }
        Self { own, cross }
    }
}

/// Per-trial sums for every requested SNR.
struct TrialSums {
    /// `[rho][batch]` sums of per-cell-slot-subchannel rates.
    batches: Vec<Vec<f64>>,
    no_interference: Vec<f64>,
    /// `[rho][k]` bits summed over cells.
    user_bits: Vec<Vec<f64>>,
    /// `[rho][k]` selections summed over cells.
    selections: Vec<Vec<u64>>,
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn run_trial(cfg: &PfsSimConfig, params: &ChannelParams, rhos: &[f64], trial: usize) -> TrialSums {
    let mut rng = trial_rng(cfg.seed, trial);
    let geo = Geometry::draw(&mut rng, cfg, params);
    let (n, k, m_sub) = (cfg.n_cells, cfg.k, cfg.m_sub);
    let literal = cfg.rule == SelectionRule::LiteralPfs;
    let nr = rhos.len();
    let mut sums = TrialSums {
        batches: vec![vec![0.0; BATCHES]; nr],
        no_interference: vec![0.0; nr],
        user_bits: vec![vec![0.0; k]; nr],
        selections: vec![vec![0; k]; nr],
    };
    let mut throughput = vec![vec![INITIAL_THROUGHPUT; k]; n];
    let mut prev_interf = vec![vec![0.0; m_sub]; n];
    let mut fading = vec![0.0; k];
    let mut gains = vec![0.0; k];
    let mut selected = vec![vec![0usize; m_sub]; n];
    let mut signal = vec![vec![0.0; m_sub]; n];
    let mut interf = vec![vec![0.0; m_sub]; n];
    let mut served = vec![vec![0.0; k]; n];
    let used = cfg.slots_used();
    for slot in 0..cfg.n_slots {
        for j in 0..n {
            for m in 0..m_sub {
                for f in fading.iter_mut() {
                    *f = Exp1.sample(&mut rng);
                }
                let pick = if literal {
                    for (g, (&s, &f)) in gains.iter_mut().zip(geo.own[j].iter().zip(&fading)) {
                        *g = s * f;
                    }
                    selection_literal_pfs(&gains, &throughput[j], rhos[0], prev_interf[j][m])
                } else {
                    selection_asymptotic(&fading)
                };
                selected[j][m] = pick;
                signal[j][m] = geo.own[j][pick] * fading[pick];
            }
        }
        for bs in 0..n {
            for m in 0..m_sub {
                let mut total = 0.0;
                for j in 0..n {
                    if j != bs {
                        let f: f64 = Exp1.sample(&mut rng);
                        total += geo.cross[bs][j][selected[j][m]] * f;
                    }
                }
                interf[bs][m] = total;
            }
        }
        let measured = slot >= cfg.burn_in;
        let batch = if measured { (slot - cfg.burn_in) * BATCHES / used } else { 0 };
        for (ri, &rho) in rhos.iter().enumerate() {
            for bs in 0..n {
                served[bs].iter_mut().for_each(|v| *v = 0.0);
                for m in 0..m_sub {
                    let rate = (rho * signal[bs][m] / (1.0 + rho * interf[bs][m])).ln_1p() / std::f64::consts::LN_2;
                    let pick = selected[bs][m];
                    served[bs][pick] += rate;
                    if measured {
                        sums.batches[ri][batch] += rate;
                        sums.no_interference[ri] += (rho * signal[bs][m]).ln_1p() / std::f64::consts::LN_2;
                        sums.user_bits[ri][pick] += rate;
                        sums.selections[ri][pick] += 1;
                    }
                }
                if literal {
                    update_throughput(&mut throughput[bs], &served[bs], cfg.t_c);
                }
            }
        }
        if literal {
            std::mem::swap(&mut prev_interf, &mut interf);
        }
    }
    sums
}

/// Simulates one configuration.
pub fn simulate_pfs(config: &PfsSimConfig, params: &ChannelParams) -> Result<PfsSimResult> {
    let mut out = simulate_pfs_sweep(config, &[config.rho], params)?;
    Ok(out.remove(0))
}

/// Simulates several SNRs. Under the asymptotic rule the selections do not
/// depend on `rho`, so all SNRs share one pass over the same draws; the
/// literal rule runs one pass per SNR with the same seed.
pub fn simulate_pfs_sweep(config: &PfsSimConfig, rhos: &[f64], params: &ChannelParams) -> Result<Vec<PfsSimResult>> {
    params.validate()?;
    config.validate()?;
    if rhos.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidParams("rho must be positive".into()));
    }
    match config.rule {
        SelectionRule::AsymptoticMaxFading => Ok(aggregate(config, params, rhos)),
        SelectionRule::LiteralPfs => Ok(rhos
            .iter()
            .map(|&rho| {
                let cfg = PfsSimConfig { rho, ..config.clone() };
                aggregate(&cfg, params, &[rho]).remove(0)
            })
            .collect()),
    }
}

fn aggregate(cfg: &PfsSimConfig, params: &ChannelParams, rhos: &[f64]) -> Vec<PfsSimResult> {
    let trials: Vec<TrialSums> = (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, params, rhos, t)).collect();
    let per_trial = (cfg.n_cells * cfg.m_sub * cfg.slots_used()) as f64;
    let per_batch = per_trial / BATCHES as f64;
    rhos.iter()
        .enumerate()
        .map(|(ri, &rho)| {
            let means: Vec<f64> = trials.iter().map(|t| t.batches[ri].iter().sum::<f64>() / per_trial).collect();
            let c = means.iter().sum::<f64>() / means.len() as f64;
            let std_error = if means.len() > 1 {
                standard_error(&means)
            } else {
                let b: Vec<f64> = trials[0].batches[ri].iter().map(|s| s / per_batch).collect();
                standard_error(&b)
            };
            let total = per_trial * cfg.trials as f64;
            let c_no_interference = trials.iter().map(|t| t.no_interference[ri]).sum::<f64>() / total;
            let cells_slots = (cfg.n_cells * cfg.slots_used() * cfg.trials) as f64;
            let per_user_throughput = (0..cfg.k)
                .map(|k| trials.iter().map(|t| t.user_bits[ri][k]).sum::<f64>() / (cells_slots * cfg.m_sub as f64))
                .collect();
            let selection_fractions = (0..cfg.k)
                .map(|k| trials.iter().map(|t| t.selections[ri][k] as f64).sum::<f64>() / total)
                .collect();
            PfsSimResult {
                rho,
                c_estimate: c,
                std_error,
                ebn0_db: to_db(rho / c),
                c_no_interference,
                per_user_throughput,
                selection_fractions,
                slots_used: cfg.slots_used(),
                trials: cfg.trials,
            }
        })
        .collect()
}

fn standard_error(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(rule: SelectionRule) -> PfsSimConfig {
        PfsSimConfig { n_slots: 2_000, trials: 4, n_cells: 7, ..PfsSimConfig::new(5, 10.0, rule) }.with_window(50.0)
    }

    #[test]
    fn asymptotic_selection_examples() {
        assert_eq!(selection_asymptotic(&[0.1, 2.5, 1.0]), 1);
        assert_eq!(selection_asymptotic(&[0.3, 0.3]), 0);
        let scaled: Vec<f64> = [0.1, 2.5, 1.0].iter().map(|f| f * 7.3).collect();
        assert_eq!(selection_asymptotic(&scaled), 1);
    }

    #[test]
    fn literal_selection_examples() {
        assert_eq!(selection_literal_pfs(&[0.4], &[0.2], 10.0, 1.0), 0);
        let f = [0.3, 1.9, 0.7];
        assert_eq!(selection_literal_pfs(&f, &[1.0; 3], 5.0, 0.2), selection_asymptotic(&f));
        // a starved user wins despite a weaker channel
        assert_eq!(selection_literal_pfs(&[1.0, 0.9], &[1.0, 1e-3], 1.0, 0.0), 1);
    }

    #[test]
    fn throughput_update() {
        let mut t = vec![1.0, 1.0];
        update_throughput(&mut t, &[2.0, 0.0], 4.0);
        assert_eq!(t, vec![1.25, 0.75]);
    }

    #[test]
    fn config_validation() {
        let ok = PfsSimConfig::new(10, 1.0, SelectionRule::LiteralPfs);
        assert!(ok.validate().is_ok());
        assert_eq!(ok.burn_in, 10_000);
        assert!(PfsSimConfig { n_cells: 20, ..ok.clone() }.validate().is_err());
        assert!(PfsSimConfig { n_slots: 10_000, ..ok.clone() }.validate().is_err());
        assert!(PfsSimConfig { k: 0, ..ok }.validate().is_err());
    }

    #[test]
    fn single_user_always_served() {
        let cfg = PfsSimConfig { k: 1, ..small(SelectionRule::LiteralPfs) };
        let r = simulate_pfs(&cfg, &ChannelParams::default()).unwrap();
        assert_eq!(r.selection_fractions, vec![1.0]);
    }

    #[test]
    fn fractions_sum_to_one_and_deterministic() {
        let p = ChannelParams::default();
        for rule in [SelectionRule::AsymptoticMaxFading, SelectionRule::LiteralPfs] {
            let a = simulate_pfs(&small(rule), &p).unwrap();
            assert!((a.selection_fractions.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(a.c_estimate > 0.0 && a.c_no_interference > a.c_estimate);
            let b = simulate_pfs(&small(rule), &p).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sweep_matches_single_runs() {
        let p = ChannelParams::default();
        let cfg = small(SelectionRule::AsymptoticMaxFading);
        let sweep = simulate_pfs_sweep(&cfg, &[1.0, 10.0], &p).unwrap();
        let single = simulate_pfs(&PfsSimConfig { rho: 10.0, ..cfg }, &p).unwrap();
        assert_eq!(sweep[1], single);
        assert!(sweep[1].c_estimate > sweep[0].c_estimate);
    }
}
