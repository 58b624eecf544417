use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::set::{Set, MAX_ELEMENTS};

/// Positive weights `w(u)` and a budget `B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    weights: Vec<f64>,
    budget: f64,
}

impl KnapsackInstance {
    pub fn new(weights: Vec<f64>, budget: f64) -> Result<KnapsackInstance> {
        if weights.len() > MAX_ELEMENTS {
            return Err(invalid(format!(
                "{} weights exceed the {MAX_ELEMENTS}-element limit",
                weights.len()
            )));
        }
        if let Some((u, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(invalid(format!(
                "weight of element {u} must be positive and finite, got {w}"
            )));
        }
        if !(budget.is_finite() && budget >= 0.0) {
            return Err(invalid(format!("budget must be non-negative and finite, got {budget}")));
        }
        Ok(KnapsackInstance { weights, budget })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, u: usize) -> f64 {
        self.weights[u]
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// `w(S)` in ascending element order.
    pub fn weight_of(&self, s: Set) -> f64 {
        s.iter().map(|u| self.weights[u]).sum()
    }

    pub fn is_feasible(&self, s: Set) -> bool {
        self.weight_of(s) <= self.budget
    }
}
