//! Hard-fairness (delay-limited) multi-cell capacity.

mod asymptotic;
mod finite;

pub use asymptotic::{
    asymptotic_interference, interference_integral, mc_denominator, mc_ebn0, sc_ebn0, sc_integral,
    spectral_efficiency_limit, OperatingPoint,
};
pub use finite::{
    energies_for_order, finite_k_multicell_fixed_point, is_rate_feasible, minimize_rate_split,
    minimize_rate_split_with, optimal_energy_allocation, ring_offset, DecodingOrder, FiniteCellConfig,
    FixedPointOptions, FixedPointResult, RateSplit, RingPopulation, SplitOptions, SplitSolution,
};
