//! Exhaustive optimum over a feasibility constraint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::set::Set;
use crate::setfn::SetFunction;

/// Largest ground set [`brute_force_opt`] will scan.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Clone, Copy)]
pub enum Constraint<'a> {
    None,
    Matroid(&'a dyn Matroid),
    Knapsack { weights: &'a [f64], budget: f64 },
}

impl Constraint<'_> {
    pub fn admits(&self, s: Set) -> bool {
        match self {
            Constraint::None => true,
            Constraint::Matroid(m) => m.check(s),
            Constraint::Knapsack { weights, budget } => s.iter().map(|u| weights[u]).sum::<f64>() <= *budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub opt_value: f64,
    pub opt_set: Set,
    pub feasible_count: u64,
}

/// Best feasible subset of the whole ground set.
pub fn brute_force_opt<F: SetFunction + ?Sized>(f: &F, constraint: Constraint<'_>) -> Result<BruteForceResult> {
    brute_force_within(f, Set::full(f.ground_size()), constraint)
}

/// Best feasible subset of `ground`, scanned in ascending mask order with ties
/// to the smallest mask. Evaluation is uncounted.
pub fn brute_force_within<F: SetFunction + ?Sized>(
    f: &F,
    ground: Set,
    constraint: Constraint<'_>,
) -> Result<BruteForceResult> {
    if ground.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            n: ground.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut best: Option<(f64, Set)> = None;
    let mut feasible_count = 0;
    for s in ground.subsets() {
        if !constraint.admits(s) {
            continue;
        }
        feasible_count += 1;
        let v = f.eval(s);
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, s));
        }
    }
    // The empty set is feasible under every supported constraint.
    let (opt_value, opt_set) = best.expect("empty set is feasible");
    Ok(BruteForceResult {
        opt_value,
        opt_set,
        feasible_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::make_uniform;
    use crate::setfn::{make_coverage, make_cut};

    #[test]
    fn unconstrained_modular_takes_positive_elements() {
        let f = make_coverage(vec![1.0, 0.0, 2.0], &[vec![0], vec![1], vec![2]]).unwrap();
        let r = brute_force_opt(&f, Constraint::None).unwrap();
        // Element 1 has zero weight, so the smaller mask {0, 2} wins the tie.
        assert_eq!(r.opt_set, Set::from_elements([0, 2]));
        assert_eq!(r.opt_value, 3.0);
        assert_eq!(r.feasible_count, 8);
    }

    #[test]
    fn uniform_one_is_best_singleton() {
        let f = make_coverage(vec![1.0, 5.0, 2.0], &[vec![0], vec![1], vec![2]]).unwrap();
        let m = make_uniform(3, 1).unwrap();
        let r = brute_force_opt(&f, Constraint::Matroid(&m)).unwrap();
        assert_eq!(r.opt_set, Set::singleton(1));
        assert_eq!(r.feasible_count, 4);
    }

    #[test]
    fn four_cycle_cut() {
        let f = make_cut(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
        let r = brute_force_opt(&f, Constraint::None).unwrap();
        assert_eq!(r.opt_value, 4.0);
        assert_eq!(r.opt_set, Set::from_elements([0, 2]));
    }

    #[test]
    fn knapsack_and_refusal() {
        let f = make_coverage(vec![3.0, 2.0, 2.0], &[vec![0], vec![1], vec![2]]).unwrap();
        let w = [2.0, 1.0, 1.0];
        let r = brute_force_opt(
            &f,
            Constraint::Knapsack {
                weights: &w,
                budget: 2.0,
            },
        )
        .unwrap();
        assert_eq!(r.opt_set, Set::from_elements([1, 2]));
        let big = make_cut(21, vec![(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            brute_force_opt(&big, Constraint::None),
            Err(Error::TooLarge { .. })
        ));
    }
}
