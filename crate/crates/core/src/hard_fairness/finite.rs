//! Exact finite-K single-cell and ring computations.
//!
//! Rates are in nats per symbol. On each subchannel users are decoded in
//! ascending-gain order, which makes the successive-cancellation energies the
//! minimum-sum vertex of the received-energy region.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Permutation of user indices with non-decreasing gains; ties go to the lower index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingOrder(Vec<usize>);

impl DecodingOrder {
    pub fn ascending(gains: &[f64]) -> Self {
        let mut idx: Vec<usize> = (0..gains.len()).collect();
        idx.sort_by(|&i, &j| gains[i].total_cmp(&gains[j]).then(i.cmp(&j)));
        Self(idx)
    }

    /// Arbitrary order; `perm` must be a permutation of `0..perm.len()`.
    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParams(format!("{perm:?} is not a permutation")));
            }
        }
        Ok(Self(perm))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Energies that put `rates` on the boundary of the region when users are
/// decoded in `order`; `level` is `N0 + I` on the subchannel.
pub fn energies_for_order(gains: &[f64], rates: &[f64], level: f64, order: &DecodingOrder) -> Vec<f64> {
    let mut e = vec![0.0; gains.len()];
    let mut cum = 0.0f64;
    for &k in order.as_slice() {
        // e^{S_k} - e^{S_{k-1}} without cancellation
        e[k] = level / gains[k] * cum.exp() * rates[k].exp_m1();
        cum += rates[k];
    }
    e
}

/// Minimum-total-energy allocation for one subchannel.
pub fn optimal_energy_allocation(gains: &[f64], rates: &[f64], level: f64) -> Vec<f64> {
    energies_for_order(gains, rates, level, &DecodingOrder::ascending(gains))
}

/// Checks `sum_{k in S} R_k <= ln(1 + sum_{k in S} g_k E_k / level)` for
/// every non-empty subset `S` (exponential in `K`).
pub fn is_rate_feasible(gains: &[f64], rates: &[f64], energies: &[f64], level: f64, tol: f64) -> bool {
    let k = gains.len();
    assert!(k < 24, "subset enumeration limited to K < 24");
    (1u32..(1 << k)).all(|mask| {
        let (mut r, mut p) = (0.0, 0.0);
        for i in (0..k).filter(|i| mask & (1 << i) != 0) {
            r += rates[i];
            p += gains[i] * energies[i];
        }
        r <= (p / level).ln_1p() + tol
    })
}

/// One cell with `K` users on `M` subchannels.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteCellConfig {
    /// Total rate per user, nats per symbol.
    pub rates: Vec<f64>,
    /// `gains[k][m]`.
    pub gains: Vec<Vec<f64>>,
    pub noise: f64,
    /// Out-of-cell interference per subchannel.
    pub interference: Vec<f64>,
}

impl FiniteCellConfig {
    pub fn new(rates: Vec<f64>, gains: Vec<Vec<f64>>, noise: f64, interference: Vec<f64>) -> Result<Self> {
        let cfg = Self { rates, gains, noise, interference };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.interference.len();
        if m == 0 || self.gains.len() != self.rates.len() {
            return Err(Error::InvalidParams("shape mismatch between rates, gains and interference".into()));
        }
        if self.gains.iter().any(|g| g.len() != m || g.iter().any(|&x| !(x > 0.0 && x.is_finite()))) {
            return Err(Error::InvalidParams("gains must be positive and K x M".into()));
        }
        if self.rates.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
            return Err(Error::InvalidParams("rates must be non-negative".into()));
        }
        if !(self.noise > 0.0) || self.interference.iter().any(|&i| !(i >= 0.0)) {
            return Err(Error::InvalidParams("noise must be positive and interference non-negative".into()));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.rates.len()
    }

    pub fn m(&self) -> usize {
        self.interference.len()
    }

    pub fn subchannel_gains(&self, m: usize) -> Vec<f64> {
        self.gains.iter().map(|g| g[m]).collect()
    }

    pub fn level(&self, m: usize) -> f64 {
        self.noise + self.interference[m]
    }

    /// Optimal energies `[m][k]` for the given split.
    pub fn energies(&self, split: &RateSplit) -> Vec<Vec<f64>> {
        (0..self.m())
            .map(|m| {
                let rates: Vec<f64> = split.partial.iter().map(|r| r[m]).collect();
                optimal_energy_allocation(&self.subchannel_gains(m), &rates, self.level(m))
            })
            .collect()
    }

    pub fn total_energy(&self, split: &RateSplit) -> f64 {
        self.energies(split).iter().flatten().sum()
    }
}

/// Partial rates `partial[k][m]` summing to each user's total.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSplit {
    pub partial: Vec<Vec<f64>>,
}

impl RateSplit {
    /// Each user's whole rate on the subchannel maximizing `g / (N0 + I)`.
    pub fn best_sinr(config: &FiniteCellConfig) -> Self {
        let partial = config
            .rates
            .iter()
            .zip(&config.gains)
            .map(|(&r, g)| {
                let best = (0..config.m())
                    .max_by(|&a, &b| (g[a] / config.level(a)).total_cmp(&(g[b] / config.level(b))).then(b.cmp(&a)))
                    .unwrap_or(0);
                let mut row = vec![0.0; config.m()];
                row[best] = r;
                row
            })
            .collect();
        Self { partial }
    }

    /// Subchannel carrying each user's full rate, if the split is unsplit.
    pub fn assignment(&self) -> Option<Vec<usize>> {
        self.partial
            .iter()
            .map(|row| {
                let nz: Vec<usize> = (0..row.len()).filter(|&m| row[m] > 0.0).collect();
                match nz.len() {
                    0 => Some(0),
                    1 => Some(nz[0]),
                    _ => None,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitOptions {
    pub max_sweeps: usize,
    pub rel_tol: f64,
}

impl Default for SplitOptions {
    fn default() -> Self {
        Self { max_sweeps: 10_000, rel_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSolution {
    pub split: RateSplit,
    pub total_energy: f64,
    pub sweeps: usize,
}

/// Minimizes `sum_m sum_k b_m e^{x_m}` over `sum_m x_m = total`, `x >= 0`.
fn water_fill(log_b: &[f64], total: f64, out: &mut [f64]) {
    let mut idx: Vec<usize> = (0..log_b.len()).collect();
    idx.sort_by(|&i, &j| log_b[i].total_cmp(&log_b[j]));
    let mut sum = 0.0;
    let mut level = 0.0;
    for (n, &i) in idx.iter().enumerate() {
        sum += log_b[i];
        level = (total + sum) / (n + 1) as f64;
        if n + 1 == idx.len() || level <= log_b[idx[n + 1]] {
            break;
        }
    }
    for (o, &lb) in out.iter_mut().zip(log_b) {
        *o = (level - lb).max(0.0);
    }
}

/// Coordinate weight `ln b_m` of user `k` on subchannel `m` given the others' rates.
fn user_log_weight(config: &FiniteCellConfig, split: &RateSplit, order: &DecodingOrder, m: usize, k: usize) -> f64 {
    let perm = order.as_slice();
    // S_i excluding user k, weights w_i = 1/g_i - 1/g_{i+1}
    let mut cum = 0.0;
    let mut acc = 0.0;
    let mut after = false;
    let mut scale = f64::NEG_INFINITY;
    let mut terms = Vec::with_capacity(perm.len());
    for (pos, &i) in perm.iter().enumerate() {
        if i == k {
            after = true;
        } else {
            cum += split.partial[i][m];
        }
        if after {
            let next = perm.get(pos + 1).map_or(0.0, |&j| 1.0 / config.gains[j][m]);
            let w = 1.0 / config.gains[i][m] - next;
            if w > 0.0 {
                terms.push((cum, w));
                scale = scale.max(cum);
            }
        }
    }
    for (s, w) in terms {
        acc += (s - scale).exp() * w;
    }
    config.level(m).ln() + scale + acc.ln()
}

/// Minimum total energy over rate splits by exact coordinate descent over
/// users, started from the best-SINR split.
pub fn minimize_rate_split(config: &FiniteCellConfig) -> Result<SplitSolution> {
    minimize_rate_split_with(config, SplitOptions::default())
}

pub fn minimize_rate_split_with(config: &FiniteCellConfig, opts: SplitOptions) -> Result<SplitSolution> {
    config.validate()?;
    let mut split = RateSplit::best_sinr(config);
    let mut energy = config.total_energy(&split);
    if config.m() == 1 {
        return Ok(SplitSolution { split, total_energy: energy, sweeps: 0 });
    }
    let orders: Vec<DecodingOrder> =
        (0..config.m()).map(|m| DecodingOrder::ascending(&config.subchannel_gains(m))).collect();
    let mut log_b = vec![0.0; config.m()];
    let mut row = vec![0.0; config.m()];
    for sweep in 1..=opts.max_sweeps {
        for k in 0..config.k() {
            if config.rates[k] == 0.0 {
                continue;
            }
            for m in 0..config.m() {
                log_b[m] = user_log_weight(config, &split, &orders[m], m, k);
            }
            water_fill(&log_b, config.rates[k], &mut row);
            split.partial[k].copy_from_slice(&row);
        }
        let next = config.total_energy(&split);
        let improvement = energy - next;
        energy = next;
        if improvement <= opts.rel_tol * energy.abs() {
            return Ok(SplitSolution { split, total_energy: energy, sweeps: sweep });
        }
    }
    Err(Error::IterationLimit(opts.max_sweeps))
}

/// `N` cells on a ring with `K` users each. Gains are indexed
/// `own[j][k][m]` and `cross[n][j][k][m]` (user `k` of cell `j` seen at BS `n`).
#[derive(Debug, Clone, PartialEq)]
pub struct RingPopulation {
    pub own: Vec<Vec<Vec<f64>>>,
    pub cross: Vec<Vec<Vec<Vec<f64>>>>,
}

impl RingPopulation {
    pub fn n_cells(&self) -> usize {
        self.own.len()
    }

    /// Draws a ring with users uniform on `(delta, r)` at a random side of
    /// their BS and i.i.d. unit-mean exponential fading on every link.
    pub fn sample<R: rand::Rng + ?Sized>(
        params: &crate::channel::ChannelParams,
        n_cells: usize,
        k: usize,
        rng: &mut R,
    ) -> Result<Self> {
        use rand_distr::{Distribution, Exp1};
        params.validate()?;
        if n_cells < 2 {
            return Err(Error::InvalidParams("ring needs at least 2 cells".into()));
        }
        let m = params.m;
        let mut own = vec![vec![vec![0.0; m]; k]; n_cells];
        let mut cross = vec![vec![vec![vec![0.0; m]; k]; n_cells]; n_cells];
        for j in 0..n_cells {
            for user in 0..k {
                let u: f64 = rng.gen_range(params.delta..params.radius());
                let side: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
                for n in 0..n_cells {
                    let dist = if n == j {
                        u
                    } else {
                        let off = ring_offset(j, n, n_cells);
                        let toward = off.signum() == side;
                        let span = off.unsigned_abs() as f64 * params.d;
                        if toward { span - u } else { span + u }
                    };
                    let pl = dist.powf(-params.alpha);
                    for sub in 0..m {
                        let f: f64 = Exp1.sample(rng);
                        if n == j {
                            own[j][user][sub] = pl * f;
                        } else {
                            cross[n][j][user][sub] = pl * f;
                        }
                    }
                }
            }
        }
        Ok(Self { own, cross })
    }
}

/// Signed shortest displacement from cell `from` to cell `to` on a ring of `n`.
pub fn ring_offset(from: usize, to: usize, n: usize) -> i64 {
    let d = (to as i64 - from as i64).rem_euclid(n as i64);
    if 2 * d > n as i64 {
        d - n as i64
    } else {
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions {
    pub tol: f64,
    pub max_iterations: usize,
    /// Interference (in units of `noise`) treated as divergence.
    pub cap: f64,
    /// Re-pick best-SINR subchannels every round instead of fixing each
    /// user on its strongest subchannel. The map is then no longer monotone
    /// and may cycle between assignments.
    pub resplit_each_round: bool,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iterations: 100_000, cap: 1e8, resplit_each_round: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResult {
    /// `interference[n][m]` at each BS.
    pub interference: Vec<Vec<f64>>,
    /// Total transmitted-and-received energy per cell.
    pub cell_energy: Vec<f64>,
    /// Per-cell system `Eb/N0` (linear, per bit).
    pub cell_ebn0: Vec<f64>,
    pub iterations: usize,
}

/// Energies `[k][m]` of one cell for interference levels `interf`. Without a
/// fixed split the best-SINR split at `interf` is used.
fn cell_energies(
    own: &[Vec<f64>],
    rates: &[f64],
    noise: f64,
    interf: &[f64],
    split: Option<&RateSplit>,
) -> Vec<Vec<f64>> {
    let cfg = FiniteCellConfig { rates: rates.to_vec(), gains: own.to_vec(), noise, interference: interf.to_vec() };
    let per_sub = match split {
        Some(s) => cfg.energies(s),
        None => cfg.energies(&RateSplit::best_sinr(&cfg)),
    };
    (0..rates.len()).map(|k| per_sub.iter().map(|e| e[k]).collect()).collect()
}

/// Iterates the coupled interference map from zero until the largest change
/// is below `tol` (relative to `noise`). By default each user's rate stays on
/// the subchannel that is best at zero interference, which keeps the map
/// monotone.
pub fn finite_k_multicell_fixed_point(
    ring: &RingPopulation,
    rates: &[Vec<f64>],
    noise: f64,
    opts: FixedPointOptions,
) -> Result<FixedPointResult> {
    let n = ring.n_cells();
    if rates.len() != n || !(noise > 0.0) {
        return Err(Error::InvalidParams("one rate vector per cell and positive noise required".into()));
    }
    let m = ring.own.first().and_then(|c| c.first()).map_or(0, Vec::len);
    let mut interf = vec![vec![0.0; m]; n];
    let fixed: Option<Vec<RateSplit>> = (!opts.resplit_each_round).then(|| {
        (0..n)
            .map(|j| {
                let cfg = FiniteCellConfig {
                    rates: rates[j].clone(),
                    gains: ring.own[j].clone(),
                    noise,
                    interference: vec![0.0; m],
                };
                RateSplit::best_sinr(&cfg)
            })
            .collect()
    });
    let split_of = |j: usize| fixed.as_ref().map(|f| &f[j]);
    for iter in 1..=opts.max_iterations {
        let energies: Vec<Vec<Vec<f64>>> = (0..n)
            .into_par_iter()
            .map(|j| cell_energies(&ring.own[j], &rates[j], noise, &interf[j], split_of(j)))
            .collect();
        let next: Vec<Vec<f64>> = (0..n)
            .map(|bs| {
                (0..m)
                    .map(|sub| {
                        (0..n)
                            .filter(|&j| j != bs)
                            .map(|j| {
                                energies[j].iter().zip(&ring.cross[bs][j]).map(|(e, g)| e[sub] * g[sub]).sum::<f64>()
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let change = interf
            .iter()
            .flatten()
            .zip(next.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        interf = next;
        if interf.iter().flatten().any(|&i| !(i <= opts.cap * noise)) {
            return Err(Error::Divergence { cap: opts.cap });
        }
        if change < opts.tol * noise {
            let cell_energy: Vec<f64> = (0..n)
                .map(|j| {
                    cell_energies(&ring.own[j], &rates[j], noise, &interf[j], split_of(j)).iter().flatten().sum()
                })
                .collect();
            let cell_ebn0 = cell_energy
                .iter()
                .zip(rates)
                .map(|(e, r)| std::f64::consts::LN_2 * e / (noise * r.iter().sum::<f64>()))
                .collect();
            return Ok(FixedPointResult { interference: interf, cell_energy, cell_ebn0, iterations: iter });
        }
    }
    Err(Error::IterationLimit(opts.max_iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn single_user_inversion() {
        let e = optimal_energy_allocation(&[2.0], &[1.0], 1.0);
        assert!((e[0] - 0.859141).abs() < 1e-6);
        assert!((e[0] - (std::f64::consts::E - 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_rates_zero_energy() {
        assert!(optimal_energy_allocation(&[1.0, 3.0, 2.0], &[0.0; 3], 1.5).iter().all(|&e| e == 0.0));
    }

    #[test]
    fn two_user_both_orders() {
        let g = [1.0, 4.0];
        let r = [0.5, 0.5];
        let best = optimal_energy_allocation(&g, &r, 1.0);
        let swapped = energies_for_order(&g, &r, 1.0, &DecodingOrder::from_permutation(vec![1, 0]).unwrap());
        assert!(best.iter().sum::<f64>() <= swapped.iter().sum::<f64>());
        assert!(is_rate_feasible(&g, &r, &best, 1.0, 1e-12));
        assert!(is_rate_feasible(&g, &r, &swapped, 1.0, 1e-12));
        // boundary: the full-set constraint is tight
        let p: f64 = g.iter().zip(&best).map(|(g, e)| g * e).sum();
        assert!((p.ln_1p() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ascending_order_beats_all_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for k in 1..=5 {
            for _ in 0..10 {
                let g: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..5.0)).collect();
                let r: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
                let best: f64 = optimal_energy_allocation(&g, &r, 1.3).iter().sum();
                for perm in all_perms(k) {
                    let o = DecodingOrder::from_permutation(perm).unwrap();
                    let e = energies_for_order(&g, &r, 1.3, &o);
                    assert!(best <= e.iter().sum::<f64>() * (1.0 + 1e-12));
                    assert!(is_rate_feasible(&g, &r, &e, 1.3, 1e-9));
                }
            }
        }
    }

    #[test]
    fn ties_break_by_index() {
        assert_eq!(DecodingOrder::ascending(&[2.0, 1.0, 2.0, 1.0]).as_slice(), &[1, 3, 0, 2]);
        assert!(DecodingOrder::from_permutation(vec![0, 0]).is_err());
    }

    #[test]
    fn water_fill_cases() {
        let mut x = [0.0; 3];
        water_fill(&[0.0, 0.0, 0.0], 3.0, &mut x);
        assert!(x.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        water_fill(&[0.0, 5.0, 9.0], 1.0, &mut x);
        assert_eq!(x, [1.0, 0.0, 0.0]);
        water_fill(&[0.0, 1.0], 3.0, &mut x[..2]);
        assert!((x[0] - 2.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_subchannel_split_is_trivial() {
        let cfg = FiniteCellConfig::new(vec![0.3, 0.7], vec![vec![1.0], vec![2.0]], 1.0, vec![0.5]).unwrap();
        let sol = minimize_rate_split(&cfg).unwrap();
        let direct: f64 = optimal_energy_allocation(&[1.0, 2.0], &[0.3, 0.7], 1.5).iter().sum();
        assert_eq!(sol.total_energy, direct);
    }

    #[test]
    fn two_by_two_matches_grid() {
        let cfg = FiniteCellConfig::new(
            vec![0.8, 0.6],
            vec![vec![1.0, 1.6], vec![2.5, 1.2]],
            1.0,
            vec![0.2, 0.0],
        )
        .unwrap();
        let sol = minimize_rate_split(&cfg).unwrap();
        let steps = 1000;
        let mut best = f64::INFINITY;
        for a in 0..=steps {
            for b in 0..=steps {
                let x = a as f64 / steps as f64;
                let y = b as f64 / steps as f64;
                let split = RateSplit {
                    partial: vec![vec![0.8 * x, 0.8 * (1.0 - x)], vec![0.6 * y, 0.6 * (1.0 - y)]],
                };
                best = best.min(cfg.total_energy(&split));
            }
        }
        assert!(sol.total_energy <= best + 1e-12);
        assert!((sol.total_energy - best).abs() < 1e-5, "{} vs {best}", sol.total_energy);
    }

    #[test]
    fn objective_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = 12;
        let gains = (0..k).map(|_| (0..3).map(|_| rng.gen_range(0.2..4.0)).collect()).collect();
        let rates = (0..k).map(|_| rng.gen_range(0.1..0.6)).collect();
        let cfg = FiniteCellConfig::new(rates, gains, 1.0, vec![0.0, 0.3, 0.1]).unwrap();
        let mut prev = f64::INFINITY;
        for sweeps in 1..20 {
            let opts = SplitOptions { max_sweeps: sweeps, rel_tol: 0.0 };
            let e = match minimize_rate_split_with(&cfg, opts) {
                Ok(s) => s.total_energy,
                Err(_) => continue,
            };
            assert!(e <= prev * (1.0 + 1e-14));
            prev = e;
        }
    }

    #[test]
    fn ring_offsets_are_circular() {
        assert_eq!(ring_offset(0, 1, 21), 1);
        assert_eq!(ring_offset(0, 20, 21), -1);
        assert_eq!(ring_offset(3, 14, 21), 11 - 21);
        assert_eq!(ring_offset(5, 5, 21), 0);
    }

    #[test]
    fn zero_rates_zero_interference() {
        let p = ChannelParams::default().with_subchannels(2);
        let ring = RingPopulation::sample(&p, 5, 3, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let rates = vec![vec![0.0; 3]; 5];
        let res = finite_k_multicell_fixed_point(&ring, &rates, 1.0, FixedPointOptions::default()).unwrap();
        assert!(res.interference.iter().flatten().all(|&i| i == 0.0));
    }

    #[test]
    fn single_active_cell() {
        let p = ChannelParams::default().with_subchannels(2);
        let ring = RingPopulation::sample(&p, 5, 4, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let mut rates = vec![vec![0.0; 4]; 5];
        rates[2] = vec![0.4, 0.2, 0.5, 0.3];
        let res = finite_k_multicell_fixed_point(&ring, &rates, 1.0, FixedPointOptions::default()).unwrap();
        assert!(res.interference[2].iter().all(|&i| i == 0.0));
        let e = cell_energies(&ring.own[2], &rates[2], 1.0, &[0.0, 0.0], None);
        for n in [0, 1, 3, 4] {
            for m in 0..2 {
                let direct: f64 = (0..4).map(|k| e[k][m] * ring.cross[n][2][k][m]).sum();
                assert!((res.interference[n][m] - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn overload_diverges() {
        let p = ChannelParams::default().with_subchannels(2);
        let ring = RingPopulation::sample(&p, 5, 4, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let rates = vec![vec![6.0; 4]; 5];
        let opts = FixedPointOptions { cap: 1e6, ..Default::default() };
        assert!(matches!(finite_k_multicell_fixed_point(&ring, &rates, 1.0, opts), Err(Error::Divergence { .. })));
    }
}
