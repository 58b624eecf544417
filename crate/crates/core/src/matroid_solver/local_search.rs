//! Swap local search towards a discrete stationary basis.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matroid::{complete_to_basis, Matroid};
use crate::set::Set;
use crate::setfn::SetFunction;

/// Which initializer produced `S₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initializer {
    Greedy,
    BestSingleton,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Swap {
    pub out: usize,
    pub into: usize,
    /// `f(v | S) - f(u | S - u)` at the time of the swap.
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalSearchResult {
    /// Basis of the augmented matroid.
    pub z: Set,
    pub value: f64,
    pub initializer: Initializer,
    pub s0: Set,
    pub s0_value: f64,
    pub threshold: f64,
    pub swaps: Vec<Swap>,
}

impl LocalSearchResult {
    pub fn iterations(&self) -> usize {
        self.swaps.len()
    }
}

/// Greedy on `f` over independent sets: repeatedly add the element with the
/// largest positive marginal, smallest id on ties.
pub fn greedy_independent<M, F>(m: &M, f: &F) -> Set
where
    M: Matroid + ?Sized,
    F: SetFunction + ?Sized,
{
    let mut s = Set::EMPTY;
    loop {
        let base = f.value(s);
        let mut best: Option<(usize, f64)> = None;
        for u in Set::full(m.ground_size()).difference(s) {
            if !m.is_independent(s.with(u)) {
                continue;
            }
            let gain = f.value(s.with(u)) - base;
            if gain > 0.0 && best.is_none_or(|(_, g)| gain > g) {
                best = Some((u, gain));
            }
        }
        match best {
            Some((u, _)) => s = s.with(u),
            None => return s,
        }
    }
}

/// Deterministic stand-in for the approximate initializer: the better of the
/// greedy independent set and the best feasible singleton (greedy on ties).
pub fn initialize<M, F>(m: &M, f: &F) -> (Set, f64, Initializer)
where
    M: Matroid + ?Sized,
    F: SetFunction + ?Sized,
{
    let greedy = greedy_independent(m, f);
    let greedy_value = f.value(greedy);
    let mut best = (greedy, greedy_value, Initializer::Greedy);
    for u in 0..m.n_real() {
        let s = Set::singleton(u);
        if m.is_independent(s) {
            let v = f.value(s);
            if v > best.1 {
                best = (s, v, Initializer::BestSingleton);
            }
        }
    }
    best
}

/// Swaps `u ∈ S` for `v ∉ S` while `f(v | S) - f(u | S - u) ≥ (ε/r)·f(S₀)`,
/// taking the largest score each round, lexicographically smallest `(u, v)`
/// on ties. A swap also needs a strictly positive score, which only matters
/// when `f(S₀) = 0`.
pub fn local_search<M, F>(m: &M, f: &F, epsilon: f64) -> Result<LocalSearchResult>
where
    M: Matroid + ?Sized,
    F: SetFunction + ?Sized,
{
    let (s0, s0_value, initializer) = initialize(m, f);
    let mut s = complete_to_basis(m, s0, Some(f))?;
    let r = m.rank().max(1);
    let threshold = epsilon / r as f64 * s0_value;
    let ground = Set::full(m.ground_size());
    let mut swaps = Vec::new();

    loop {
        let fs = f.value(s);
        let outside: Vec<(usize, f64)> = ground
            .difference(s)
            .iter()
            .map(|v| (v, f.value(s.with(v)) - fs))
            .collect();
        let mut best: Option<Swap> = None;
        for u in s {
            let loss = fs - f.value(s.without(u));
            for &(v, gain) in &outside {
                if !m.is_independent(s.without(u).with(v)) {
                    continue;
                }
                let score = gain - loss;
                if best.as_ref().is_none_or(|b| score > b.score) {
                    best = Some(Swap { out: u, into: v, score });
                }
            }
        }
        match best {
            Some(sw) if sw.score >= threshold && sw.score > 0.0 => {
                s = s.without(sw.out).with(sw.into);
                swaps.push(sw);
            }
            _ => break,
        }
    }

    Ok(LocalSearchResult {
        z: s,
        value: f.eval(s),
        initializer,
        s0,
        s0_value,
        threshold,
        swaps,
    })
}

/// `ceil(r / (ε·c₀))` scaled by 4, with `c₀ = f(S₀)/f(OPT)`.
pub fn iteration_bound(rank: usize, epsilon: f64, s0_value: f64, opt_value: f64) -> f64 {
    if s0_value <= 0.0 {
        return if opt_value <= 0.0 { 0.0 } else { f64::INFINITY };
    }
    let c0 = (s0_value / opt_value).min(1.0);
    (4.0 * rank as f64 / (epsilon * c0)).ceil()
}
