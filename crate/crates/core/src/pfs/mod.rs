//! Proportional-fair scheduling on the line: analytic bounds and a ring simulator.

mod bounds;
mod sim;

pub use bounds::{
    average_interference, lower_bound, pfs_capacity_limit, two_cell_average_interference, upper_bound, McEstimate,
};
pub use sim::{
    selection_asymptotic, selection_literal_pfs, simulate_pfs, simulate_pfs_sweep, update_throughput, PfsSimConfig,
    PfsSimResult, SelectionRule, INITIAL_THROUGHPUT,
};
