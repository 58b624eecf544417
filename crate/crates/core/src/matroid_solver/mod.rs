//! The matroid pipeline: local search for a stationary basis `Z`, continuous
//! greedy steered away from `Z`, pipage rounding, and the better of the two.

pub mod greedy;
pub mod local_search;
pub mod pipage;
pub mod split;

use serde::{Deserialize, Serialize};

use crate::config::AlgoConfig;
use crate::error::Result;
use crate::matroid::{AugmentedMatroid, Matroid};
use crate::set::Set;
use crate::setfn::{augment_with_dummies, SetFunction};

pub use greedy::{continuous_greedy, query_constant, GreedyRun, TraceRecord};
pub use local_search::{local_search, Initializer, LocalSearchResult};
pub use pipage::{pipage_round, PipageResult};
pub use split::{split, SplitResult};

/// Which candidate the pipeline returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chosen {
    Pipage,
    LocalSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatroidRun {
    pub n_real: usize,
    pub n_dummy: usize,
    pub rank: usize,
    pub local_search: LocalSearchResult,
    pub greedy: GreedyRun,
    pub pipage: PipageResult,
    pub chosen: Chosen,
    pub set: Set,
    pub value: f64,
    pub value_queries: u64,
    pub independence_queries: u64,
}

/// Runs the whole pipeline on `f` over `m`; both are real (non-augmented).
/// `rank(M)` dummies are added internally and stripped from the answer.
pub fn solve_matroid<M, F>(m: &M, f: &F, cfg: &AlgoConfig) -> Result<MatroidRun>
where
    M: Matroid,
    F: SetFunction,
{
    let v0 = f.queries();
    let i0 = m.queries();
    let n_real = m.ground_size();
    let mbar = AugmentedMatroid::with_default_dummies(m)?;
    let n_dummy = mbar.n_dummy();
    let fbar = augment_with_dummies(f, n_dummy)?;

    let ls = local_search(&mbar, &fbar, cfg.epsilon)?;
    let greedy = continuous_greedy(&mbar, &fbar, ls.z, cfg)?;
    let rounded = pipage_round(m, f, &greedy.y, cfg.frac_cap)?;

    let z_real = ls.z.intersection(Set::full(n_real));
    let (chosen, set, value) = if rounded.value >= ls.value {
        (Chosen::Pipage, rounded.set, rounded.value)
    } else {
        (Chosen::LocalSearch, z_real, ls.value)
    };

    Ok(MatroidRun {
        n_real,
        n_dummy,
        rank: mbar.rank(),
        local_search: ls,
        greedy,
        pipage: rounded,
        chosen,
        set,
        value,
        value_queries: f.queries() - v0,
        independence_queries: m.queries() - i0,
    })
}
