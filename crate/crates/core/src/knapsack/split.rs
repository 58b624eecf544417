//! Density-greedy split of a knapsack budget into `ℓ` disjoint parts.

use serde::{Deserialize, Serialize};

use crate::set::Set;
use crate::setfn::SetFunction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityPick {
    pub part: usize,
    pub element: usize,
    pub gain: f64,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackSplitResult {
    pub parts: Vec<Set>,
    pub empty_value: f64,
    pub part_values: Vec<f64>,
    pub picks: Vec<DensityPick>,
}

impl KnapsackSplitResult {
    pub fn union(&self) -> Set {
        self.parts.iter().fold(Set::EMPTY, |acc, &t| acc.union(t))
    }

    pub fn total_gain(&self) -> f64 {
        self.part_values.iter().map(|v| v - self.empty_value).sum()
    }

    pub fn is_disjoint(&self) -> bool {
        let total: usize = self.parts.iter().map(|t| t.len()).sum();
        total == self.union().len()
    }
}

/// Adds the pair `(u, j)` maximizing `g(u | T_j) / w(u)` over elements of
/// `candidates` that still fit, ties to the smallest `j` then the smallest `u`.
/// Stops when nothing fits or the best density is not positive.
pub fn knapsack_split<G: SetFunction + ?Sized>(
    g: &G,
    weights: &[f64],
    budget: f64,
    ell: usize,
    candidates: Set,
) -> KnapsackSplitResult {
    let ell = ell.max(1);
    let mut parts = vec![Set::EMPTY; ell];
    let empty_value = g.value(Set::EMPTY);
    let mut part_values = vec![empty_value; ell];
    let mut used = 0.0;
    let mut union = Set::EMPTY;
    let mut picks = Vec::new();

    loop {
        let fitting: Vec<usize> = candidates
            .difference(union)
            .iter()
            .filter(|&u| used + weights[u] <= budget)
            .collect();
        // (density, j, u, gain, g(T_j + u))
        let mut best: Option<(f64, usize, usize, f64, f64)> = None;
        for (j, &t) in parts.iter().enumerate() {
            for &u in &fitting {
                let v = g.value(t.with(u));
                let gain = v - part_values[j];
                let density = gain / weights[u];
                if best.is_none_or(|b| density > b.0) {
                    best = Some((density, j, u, gain, v));
                }
            }
        }
        match best {
            Some((density, j, u, gain, v)) if density > 0.0 => {
                parts[j] = parts[j].with(u);
                part_values[j] = v;
                union = union.with(u);
                used += weights[u];
                picks.push(DensityPick {
                    part: j,
                    element: u,
                    gain,
                    density,
                });
            }
            _ => break,
        }
    }

    KnapsackSplitResult {
        parts,
        empty_value,
        part_values,
        picks,
    }
}
