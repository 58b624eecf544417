//! Deterministic measured continuous greedy for a knapsack budget.

use serde::{Deserialize, Serialize};

use crate::config::AlgoConfig;
use crate::eme::{eval_f_uncounted, EmeVector, JoinedExtension};
use crate::error::{Error, Result};
use crate::set::Set;
use crate::setfn::SetFunction;

use super::split::{knapsack_split, KnapsackSplitResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmcgRecord {
    pub iteration: usize,
    pub split: KnapsackSplitResult,
    pub f_prev: f64,
    pub f_value: f64,
    pub frac: usize,
    /// `Σ_u Mar_u(y^i)·w(u)`.
    pub weighted_mass: f64,
    pub y: EmeVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmcgRun {
    pub y: EmeVector,
    pub value: f64,
    pub trace: Vec<DmcgRecord>,
}

impl DmcgRun {
    pub fn point(&self, i: usize) -> EmeVector {
        if i == 0 {
            EmeVector::zero()
        } else {
            self.trace[i - 1].y.clone()
        }
    }
}

/// `1/δ` iterations of `y ← y ⊕ δ·Σ_j e_{T_j}` with parts from
/// [`knapsack_split`] on `g(S) = F(e_S ∨ y)`, restricted to `candidates`.
pub fn knapsack_dmcg<G: SetFunction + ?Sized>(
    g: &G,
    weights: &[f64],
    budget: f64,
    candidates: Set,
    cfg: &AlgoConfig,
) -> Result<DmcgRun> {
    let n = weights.len();
    let mut y = EmeVector::zero();
    let mut f_prev = g.eval(Set::EMPTY);
    let mut trace = Vec::with_capacity(cfg.steps);

    for i in 1..=cfg.steps {
        let joined = JoinedExtension::new(g, &y, cfg.frac_cap)?;
        let parts = knapsack_split(&joined, weights, budget, cfg.ell, candidates);
        let step = EmeVector::from_coords(parts.parts.iter().map(|&t| (t, cfg.delta)))?;
        let next = y.prob_sum(&step);
        if next.frac() > cfg.frac_cap {
            return Err(Error::Budget {
                frac: next.frac(),
                cap: cfg.frac_cap,
            });
        }
        y = next;
        let f_value = eval_f_uncounted(g, &y, cfg.frac_cap)?;
        trace.push(DmcgRecord {
            iteration: i,
            split: parts,
            f_prev,
            f_value,
            frac: y.frac(),
            weighted_mass: y.marginal(n).weighted_sum(weights),
            y: y.clone(),
        });
        f_prev = f_value;
    }

    Ok(DmcgRun {
        value: f_prev,
        y,
        trace,
    })
}
