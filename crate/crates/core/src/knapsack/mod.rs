//! The knapsack pipeline: guess a small prefix `E`, run the measured
//! continuous greedy on `f(· ∪ E)` with a scaled residual budget, round, and
//! keep the best branch.

pub mod dmcg;
pub mod instance;
pub mod rounding;
pub mod split;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::AlgoConfig;
use crate::error::{Error, Result};
use crate::set::Set;
use crate::setfn::{Metered, SetFunction, Translated};

pub use dmcg::{knapsack_dmcg, DmcgRecord, DmcgRun};
pub use instance::KnapsackInstance;
pub use rounding::{knapsack_round, Exchange, RoundingResult};
pub use split::{knapsack_split, DensityPick, KnapsackSplitResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub prefix: Set,
    pub prefix_weight: f64,
    /// `(1-ε)(B - w(E))`.
    pub residual_budget: f64,
    /// `ε(B - w(E))`, the heaviest weight kept.
    pub item_cap: f64,
    /// Elements kept after dropping `E` and everything heavier than `item_cap`.
    pub candidates: Set,
    pub filtered_out: usize,
    pub dmcg: DmcgRun,
    pub rounding: RoundingResult,
    /// `S ∪ E`.
    pub set: Set,
    pub value: f64,
    pub weight: f64,
    /// `(1+ε)·B_res - w(S)`. Can be negative: rounding only promises
    /// `w(S) ≤ B_res + item_cap`, which is `B - w(E)`.
    pub overshoot_margin: f64,
    pub value_queries: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackRun {
    pub branches: Vec<Branch>,
    pub chosen: usize,
    pub set: Set,
    pub value: f64,
    pub weight: f64,
    pub value_queries: u64,
}

impl KnapsackRun {
    pub fn best(&self) -> &Branch {
        &self.branches[self.chosen]
    }
}

/// All `E` with `|E| ≤ cap` and `w(E) ≤ B`, in ascending bitmask order.
pub fn enumerate_prefixes(inst: &KnapsackInstance, cap: usize) -> Vec<Set> {
    fn grow(inst: &KnapsackInstance, cap: usize, start: usize, cur: Set, w: f64, out: &mut Vec<Set>) {
        out.push(cur);
        if cur.len() == cap {
            return;
        }
        for u in start..inst.len() {
            let nw = w + inst.weight(u);
            if nw <= inst.budget() {
                grow(inst, cap, u + 1, cur.with(u), nw, out);
            }
        }
    }
    let mut out = Vec::new();
    grow(inst, cap, 0, Set::EMPTY, 0.0, &mut out);
    out.sort_by_key(|s| s.bits());
    out
}

fn solve_branch<F: SetFunction + ?Sized>(
    f: &F,
    inst: &KnapsackInstance,
    prefix: Set,
    cfg: &AlgoConfig,
) -> Result<Branch> {
    let meter = Metered::new(f);
    let weights = inst.weights();
    let prefix_weight = inst.weight_of(prefix);
    let residual_budget = (1.0 - cfg.epsilon) * (inst.budget() - prefix_weight);
    let free = Set::full(inst.len()).difference(prefix);
    let item_cap = cfg.epsilon * (inst.budget() - prefix_weight);
    let candidates: Set = free.iter().filter(|&u| weights[u] <= item_cap).collect();

    let g = Translated::new(&meter, prefix);
    let dmcg = knapsack_dmcg(&g, weights, residual_budget, candidates, cfg)?;
    let rounding = knapsack_round(
        &g,
        weights,
        residual_budget,
        item_cap,
        candidates,
        &dmcg.y,
        cfg.frac_cap,
    )?;

    let set = rounding.set.union(prefix);
    let value = meter.value(set);
    let weight = inst.weight_of(set);
    let overshoot_margin = (1.0 + cfg.epsilon) * residual_budget - inst.weight_of(rounding.set);
    if weight > inst.budget() {
        return Err(Error::Contract(format!(
            "branch {prefix:?} returned weight {weight} above budget {}",
            inst.budget()
        )));
    }
    Ok(Branch {
        prefix,
        prefix_weight,
        residual_budget,
        item_cap,
        candidates,
        filtered_out: free.len() - candidates.len(),
        dmcg,
        rounding,
        set,
        value,
        weight,
        overshoot_margin,
        value_queries: meter.queries(),
    })
}

fn rounded(v: f64) -> f64 {
    (v * 1e12).round()
}

/// Runs every branch in parallel and returns the best `f(S ∪ E)`, ties to the
/// smaller `E` bitmask. Branch query counts are added to `f`'s counter.
pub fn solve_knapsack<F: SetFunction>(f: &F, inst: &KnapsackInstance, cfg: &AlgoConfig) -> Result<KnapsackRun> {
    if f.ground_size() != inst.len() {
        return Err(crate::error::invalid(format!(
            "function has {} elements but the knapsack has {}",
            f.ground_size(),
            inst.len()
        )));
    }
    let prefixes = enumerate_prefixes(inst, cfg.enum_cap);
    let branches: Vec<Branch> = prefixes
        .par_iter()
        .map(|&e| solve_branch(f, inst, e, cfg))
        .collect::<Result<_>>()?;

    let value_queries: u64 = branches.iter().map(|b| b.value_queries).sum();
    f.counter().add(value_queries);

    let mut chosen = 0;
    for (i, b) in branches.iter().enumerate().skip(1) {
        let best = &branches[chosen];
        let (a, c) = (rounded(b.value), rounded(best.value));
        if a > c || (a == c && b.prefix.bits() < best.prefix.bits()) {
            chosen = i;
        }
    }
    let best = &branches[chosen];
    Ok(KnapsackRun {
        set: best.set,
        value: best.value,
        weight: best.weight,
        chosen,
        branches,
        value_queries,
    })
}
