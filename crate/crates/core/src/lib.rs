//! Deterministic submodular maximization under matroid and knapsack
//! constraints, built on exact evaluation of the extended multilinear
//! extension, together with brute-force oracles and checkers for every
//! per-step inequality the algorithms rely on.

pub mod config;
pub mod eme;
pub mod error;
pub mod instance;
pub mod knapsack;
pub mod matroid;
pub mod matroid_solver;
pub mod report;
pub mod set;
pub mod setfn;
pub mod suite;
pub mod verify;

pub use config::AlgoConfig;
pub use eme::{EmeVector, MarginalVector};
pub use error::{Error, Result};
pub use knapsack::{solve_knapsack, KnapsackInstance, KnapsackRun};
pub use matroid::{AugmentedMatroid, GraphicMatroid, Matroid, Part, PartitionMatroid, UniformMatroid};
pub use set::{GroundSet, Set};
pub use setfn::{CoverageFunction, CutFunction, Metered, QueryCounter, SetFunction, TableFunction};
