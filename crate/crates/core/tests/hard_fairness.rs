use linecell::channel::{sample_fading_peak, ChannelParams, CompositeGainDist};
use linecell::hard_fairness::*;
use linecell::numerics::to_db;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::LN_2;

fn defaults() -> (ChannelParams, CompositeGainDist) {
    let p = ChannelParams::default();
    (p, CompositeGainDist::full(&p).unwrap())
}

#[test]
fn single_cell_matches_ten_million_samples() {
    let (p, d) = defaults();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 10_000_000;
    let mut xs: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(p.delta..1.0);
            sample_fading_peak(&mut rng, 10) * u.powf(-p.alpha)
        })
        .collect();
    xs.sort_unstable_by(f64::total_cmp);
    // empirical cdf stands in for G
    let est = xs
        .iter()
        .enumerate()
        .map(|(i, x)| LN_2 * ((i as f64 + 0.5) / n as f64).exp2() / x)
        .sum::<f64>()
        / n as f64;
    let exact = sc_ebn0(1.0, &d).unwrap().ebn0_linear;
    assert!((est / exact - 1.0).abs() < 2e-3, "{est} vs {exact}");
}

#[test]
fn multi_cell_dominates_and_both_increase() {
    let (p, d) = defaults();
    let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 0..50 {
        let c = 0.05 + 4.1 * i as f64 / 49.0;
        let sc = sc_ebn0(c, &d).unwrap().ebn0_db;
        let mc = mc_ebn0(c, &d, &p).unwrap().ebn0_db;
        assert!(mc >= sc, "c={c}");
        assert!(sc > prev.0 && mc > prev.1, "c={c}");
        prev = (sc, mc);
    }
}

#[test]
fn limit_root_and_blowup() {
    let (p, d) = defaults();
    let c0 = spectral_efficiency_limit(&d, &p).unwrap();
    assert!((c0 - 4.2).abs() < 0.05, "{c0}");
    assert!(mc_denominator(c0, &d, &p).unwrap().abs() < 1e-8);
    assert!(mc_ebn0(c0 - 1e-3, &d, &p).unwrap().ebn0_db > 25.0);
    assert!(mc_ebn0(c0 - 1e-4, &d, &p).unwrap().ebn0_db > 30.0);
    let mut prev = f64::INFINITY;
    for &c in &[0.5, 1.0, 2.0, 3.0, 4.0] {
        let den = mc_denominator(c, &d, &p).unwrap();
        assert!(den < prev);
        prev = den;
    }
}

#[test]
fn limit_with_twenty_subchannels() {
    let p = ChannelParams::default().with_subchannels(20);
    let d = CompositeGainDist::full(&p).unwrap();
    let c0 = spectral_efficiency_limit(&d, &p).unwrap();
    assert!((c0 - 4.73).abs() < 0.05, "{c0}");
}

fn random_cell(rng: &mut ChaCha8Rng, k: usize, m: usize, rate: f64) -> FiniteCellConfig {
    let gains = (0..k)
        .map(|_| {
            let u: f64 = rng.gen_range(0.01..1.0);
            (0..m).map(|_| -rng.gen::<f64>().ln() / (u * u)).collect()
        })
        .collect();
    FiniteCellConfig::new(vec![rate; k], gains, 1.0, vec![0.0; m]).unwrap()
}

#[test]
fn best_sinr_split_near_optimal_for_many_users() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let cfg = random_cell(&mut rng, 200, 2, 2.0 * LN_2 / 200.0);
    let opt = minimize_rate_split(&cfg).unwrap();
    let greedy = cfg.total_energy(&RateSplit::best_sinr(&cfg));
    assert!(opt.total_energy <= greedy * (1.0 + 1e-12));
    assert!(greedy <= 1.02 * opt.total_energy, "{greedy} vs {}", opt.total_energy);
}

#[test]
fn optimized_split_is_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cfg = random_cell(&mut rng, 6, 3, 0.4);
    let sol = minimize_rate_split(&cfg).unwrap();
    for (k, row) in sol.split.partial.iter().enumerate() {
        assert!((row.iter().sum::<f64>() - cfg.rates[k]).abs() < 1e-12);
        assert!(row.iter().all(|&r| r >= 0.0));
    }
    let energies = cfg.energies(&sol.split);
    for m in 0..cfg.m() {
        let rates: Vec<f64> = sol.split.partial.iter().map(|r| r[m]).collect();
        assert!(is_rate_feasible(&cfg.subchannel_gains(m), &rates, &energies[m], cfg.level(m), 1e-9));
    }
}

#[test]
fn ring_fixed_point_tracks_asymptotic_formula() {
    let (p, d) = defaults();
    let (n_cells, k, c) = (21, 50, 1.0);
    let rate = c * p.m as f64 * LN_2 / k as f64;
    let mut total = 0.0;
    let seeds = 4;
    for seed in 0..seeds {
        let ring = RingPopulation::sample(&p, n_cells, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let rates = vec![vec![rate; k]; n_cells];
        let res = finite_k_multicell_fixed_point(&ring, &rates, 1.0, FixedPointOptions::default()).unwrap();
        total += res.cell_ebn0.iter().sum::<f64>() / n_cells as f64;
    }
    let finite_db = to_db(total / seeds as f64);
    let asym_db = mc_ebn0(c, &d, &p).unwrap().ebn0_db;
    assert!((finite_db - asym_db).abs() < 1.0, "{finite_db} vs {asym_db}");
}

#[test]
fn interference_identity_with_load() {
    // I0/(N0 + I0) equals the interference share of received power
    let (p, d) = defaults();
    let c = 2.8;
    let i0 = asymptotic_interference(c, &d, &p, 1.0).unwrap();
    let load = 1.0 - mc_denominator(c, &d, &p).unwrap();
    assert!((i0 / (1.0 + i0) - load).abs() < 1e-12);
}
