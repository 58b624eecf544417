//! Ground-truth oracles and checkers. Nothing here is called by the solvers.

pub mod brute;
pub mod checks;
pub mod lovasz;
pub mod mc;
pub mod validate;

pub use brute::{brute_force_opt, brute_force_within, BruteForceResult, Constraint};
pub use checks::{check_branch, check_knapsack, check_stationarity, check_trace, CheckRecord, CheckReport};
pub use lovasz::lovasz;
pub use mc::{exact_by_distribution, mc_estimate};
