//! Greedy split of a basis into `ℓ` disjoint parts.

use serde::{Deserialize, Serialize};

use crate::matroid::Matroid;
use crate::set::Set;
use crate::setfn::SetFunction;

/// One greedy step: element `u` went to part `part` with marginal `gain`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pick {
    pub part: usize,
    pub element: usize,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    pub parts: Vec<Set>,
    /// `g(∅)`.
    pub empty_value: f64,
    /// `g(T_j)` for each part.
    pub part_values: Vec<f64>,
    pub picks: Vec<Pick>,
}

impl SplitResult {
    pub fn union(&self) -> Set {
        self.parts.iter().fold(Set::EMPTY, |acc, &t| acc.union(t))
    }

    /// `Σ_j g(T_j | ∅)`.
    pub fn total_gain(&self) -> f64 {
        self.part_values.iter().map(|v| v - self.empty_value).sum()
    }

    pub fn is_disjoint(&self) -> bool {
        let total: usize = self.parts.iter().map(|t| t.len()).sum();
        total == self.union().len()
    }
}

/// Adds, one at a time, the pair `(u, j)` maximizing `g(u | T_j)` among
/// elements that keep `⋃ T_j` independent, until the union is a basis.
/// Ties go to the smallest `j`, then the smallest `u`.
pub fn split<M, G>(m: &M, g: &G, ell: usize) -> SplitResult
where
    M: Matroid + ?Sized,
    G: SetFunction + ?Sized,
{
    let ell = ell.max(1);
    let r = m.rank();
    let ground = Set::full(m.ground_size());
    let mut parts = vec![Set::EMPTY; ell];
    let empty_value = g.value(Set::EMPTY);
    let mut part_values = vec![empty_value; ell];
    let mut union = Set::EMPTY;
    let mut picks = Vec::new();

    while union.len() < r {
        let feasible: Vec<usize> = ground
            .difference(union)
            .iter()
            .filter(|&u| m.is_independent(union.with(u)))
            .collect();
        if feasible.is_empty() {
            break;
        }
        // (gain, j, u, g(T_j + u))
        let mut best: Option<(f64, usize, usize, f64)> = None;
        for (j, &t) in parts.iter().enumerate() {
            for &u in &feasible {
                let v = g.value(t.with(u));
                let gain = v - part_values[j];
                if best.is_none_or(|b| gain > b.0) {
                    best = Some((gain, j, u, v));
                }
            }
        }
        let (gain, j, u, v) = best.expect("feasible is nonempty");
        parts[j] = parts[j].with(u);
        part_values[j] = v;
        union = union.with(u);
        picks.push(Pick {
            part: j,
            element: u,
            gain,
        });
    }

    SplitResult {
        parts,
        empty_value,
        part_values,
        picks,
    }
}
