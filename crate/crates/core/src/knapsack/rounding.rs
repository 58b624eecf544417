//! Rounding of a knapsack-feasible EME point along weighted exchange
//! directions `e_u/w(u) - e_v/w(v)`, where `F` is convex in the step length.

use serde::{Deserialize, Serialize};

use crate::eme::{eval_f, eval_f_uncounted, EmeVector};
use crate::error::{Error, Result};
use crate::set::Set;
use crate::setfn::SetFunction;

/// Coordinates within this distance of 0 or 1 are snapped.
pub const SNAP: f64 = 1e-12;

/// Slack allowed on the preconditions.
pub const PRECONDITION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub u: usize,
    pub v: usize,
    pub t_min: f64,
    pub t_max: f64,
    /// Chosen endpoint.
    pub t: f64,
    /// `g(0)`, the value before the move.
    pub g_before: f64,
    pub g_min: f64,
    pub g_mid: f64,
    pub g_max: f64,
    pub weighted_before: f64,
    pub weighted_after: f64,
    pub frac_before: usize,
    pub frac_after: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingResult {
    pub set: Set,
    pub value: f64,
    pub f_input: f64,
    pub initial_frac: usize,
    pub max_frac: usize,
    pub exchanges: Vec<Exchange>,
    /// Element left fractional when the loop ended, if any.
    pub leftover: Option<usize>,
}

fn weighted_mass(y: &EmeVector, weights: &[f64]) -> f64 {
    y.marginal(weights.len()).weighted_sum(weights)
}

fn fractional_singletons(y: &EmeVector, relaxed: Set) -> Vec<usize> {
    relaxed
        .iter()
        .filter(|&u| {
            let p = y.prob(Set::singleton(u));
            p > 0.0 && p < 1.0
        })
        .collect()
}

fn snap(p: f64) -> f64 {
    if p < SNAP {
        0.0
    } else if p > 1.0 - SNAP {
        1.0
    } else {
        p
    }
}

/// Moves `(y_u, y_v)` to `(y_u + t/w_u, y_v - t/w_v)`. The coordinate that
/// binds at an endpoint is set exactly to 0 or 1.
fn shifted(
    y: &EmeVector,
    weights: &[f64],
    u: usize,
    v: usize,
    t: f64,
    bind: Option<(usize, f64)>,
) -> Result<EmeVector> {
    let pu = y.prob(Set::singleton(u));
    let pv = y.prob(Set::singleton(v));
    let mut nu = snap((pu + t / weights[u]).clamp(0.0, 1.0));
    let mut nv = snap((pv - t / weights[v]).clamp(0.0, 1.0));
    match bind {
        Some((b, val)) if b == u => nu = val,
        Some((_, val)) => nv = val,
        None => {}
    }
    y.with_coord(Set::singleton(u), nu)?.with_coord(Set::singleton(v), nv)
}

/// Rounds `y` (supported on `candidates`) to a set `S` with `f(S) ≥ F(y)` and
/// `w(S) ≤ B + item_cap`; with `item_cap = εB` this is `w(S) ≤ (1+ε)B`.
///
/// Requires `Σ_u Mar_u(y)·w(u) ≤ B` and `w(u) ≤ item_cap` on `candidates`.
pub fn knapsack_round<F: SetFunction + ?Sized>(
    f: &F,
    weights: &[f64],
    budget: f64,
    item_cap: f64,
    candidates: Set,
    y: &EmeVector,
    frac_cap: usize,
) -> Result<RoundingResult> {
    let n = weights.len();
    if !y.elements().is_subset(candidates) {
        return Err(Error::Contract(
            "rounding input mentions elements outside the candidate set".into(),
        ));
    }
    let mass = weighted_mass(y, weights);
    if mass > budget + PRECONDITION_TOLERANCE {
        return Err(Error::Contract(format!(
            "weighted marginal mass {mass} exceeds budget {budget}"
        )));
    }
    if let Some(u) = candidates
        .iter()
        .find(|&u| weights[u] > item_cap + PRECONDITION_TOLERANCE)
    {
        return Err(Error::Contract(format!(
            "element {u} has weight {} above the item cap {item_cap}",
            weights[u]
        )));
    }

    let f_input = eval_f(f, y, frac_cap)?;
    let initial_frac = y.frac();
    let mut max_frac = initial_frac;
    let mut y = y.clone();
    let mut relaxed = Set::EMPTY;
    let mut exchanges = Vec::new();
    let max_exchanges = 2 * n + 4;

    loop {
        let mut frac_s = fractional_singletons(&y, relaxed);
        while frac_s.len() < 2 {
            let Some(u) = candidates.difference(relaxed).first() else {
                break;
            };
            y = y.relax(u);
            relaxed = relaxed.with(u);
            max_frac = max_frac.max(y.frac());
            frac_s = fractional_singletons(&y, relaxed);
        }
        if frac_s.len() < 2 {
            break;
        }
        if exchanges.len() >= max_exchanges {
            return Err(Error::Contract(format!(
                "rounding did not converge within {max_exchanges} exchanges"
            )));
        }

        let (u, v) = (frac_s[0], frac_s[1]);
        let (wu, wv) = (weights[u], weights[v]);
        let pu = y.prob(Set::singleton(u));
        let pv = y.prob(Set::singleton(v));
        let up_u = (1.0 - pu) * wu;
        let down_v = pv * wv;
        let t_max = up_u.min(down_v);
        let bind_max = if up_u <= down_v { (u, 1.0) } else { (v, 0.0) };
        let down_u = -pu * wu;
        let up_v = (pv - 1.0) * wv;
        let t_min = down_u.max(up_v);
        let bind_min = if down_u >= up_v { (u, 0.0) } else { (v, 1.0) };

        let at_max = shifted(&y, weights, u, v, t_max, Some(bind_max))?;
        let at_min = shifted(&y, weights, u, v, t_min, Some(bind_min))?;
        let mid = shifted(&y, weights, u, v, 0.5 * (t_min + t_max), None)?;
        let g_max = eval_f(f, &at_max, frac_cap)?;
        let g_min = eval_f(f, &at_min, frac_cap)?;
        let g_mid = eval_f_uncounted(f, &mid, frac_cap)?;
        let g_before = eval_f_uncounted(f, &y, frac_cap)?;

        let weighted_before = weighted_mass(&y, weights);
        let frac_before = y.frac();
        let (t, next) = if g_max >= g_min {
            (t_max, at_max)
        } else {
            (t_min, at_min)
        };
        y = next;
        max_frac = max_frac.max(y.frac());
        exchanges.push(Exchange {
            u,
            v,
            t_min,
            t_max,
            t,
            g_before,
            g_min,
            g_mid,
            g_max,
            weighted_before,
            weighted_after: weighted_mass(&y, weights),
            frac_before,
            frac_after: y.frac(),
        });
    }

    let leftover = fractional_singletons(&y, relaxed).first().copied();
    let s1 = y.sure();
    let (set, value) = match leftover {
        Some(a) => {
            let v1 = f.value(s1);
            let v2 = f.value(s1.with(a));
            if v2 > v1 {
                (s1.with(a), v2)
            } else {
                (s1, v1)
            }
        }
        None => (s1, f.value(s1)),
    };

    Ok(RoundingResult {
        set,
        value,
        f_input,
        initial_frac,
        max_frac,
        exchanges,
        leftover,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfn::make_coverage;

    #[test]
    fn integral_input_is_kept() {
        let f = make_coverage(vec![1.0, 2.0], &[vec![0], vec![1], vec![0, 1]]).unwrap();
        let y = EmeVector::indicator(Set::from_elements([0, 1]));
        let res = knapsack_round(&f, &[1.0, 1.0, 1.0], 4.0, 2.0, Set::full(3), &y, 24).unwrap();
        assert_eq!(res.set, Set::from_elements([0, 1]));
        assert!(res.exchanges.is_empty());
    }

    #[test]
    fn two_halves_of_one_item() {
        // Both elements cover the same item: F(y) = 1 - 0.25 = 0.75.
        // Either endpoint puts one element at 1 and the other at 0.
        let f = make_coverage(vec![1.0], &[vec![0], vec![0]]).unwrap();
        let y = EmeVector::from_coords([(Set::singleton(0), 0.5), (Set::singleton(1), 0.5)]).unwrap();
        let res = knapsack_round(&f, &[1.0, 1.0], 1.0, 1.0, Set::full(2), &y, 24).unwrap();
        assert!((res.f_input - 0.75).abs() < 1e-12);
        assert_eq!(res.value, 1.0);
        assert_eq!(res.set, Set::singleton(0));
        assert_eq!(res.exchanges.len(), 1);
        let ex = &res.exchanges[0];
        assert_eq!((ex.t_min, ex.t_max), (-0.5, 0.5));
        assert!((ex.g_mid - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_heavy_element() {
        let f = make_coverage(vec![1.0], &[vec![0], vec![0]]).unwrap();
        let y = EmeVector::zero();
        let err = knapsack_round(&f, &[1.5, 1.0], 2.0, 1.0, Set::full(2), &y, 24).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn set_coordinates_are_relaxed_first() {
        let f = make_coverage(vec![1.0, 1.0, 1.0], &[vec![0], vec![1], vec![2], vec![0, 2]]).unwrap();
        let y = EmeVector::from_coords([(Set::from_elements([0, 1]), 0.4), (Set::from_elements([2, 3]), 0.3)]).unwrap();
        let w = [1.0, 1.0, 1.0, 1.0];
        let res = knapsack_round(&f, &w, 2.0, 1.0, Set::full(4), &y, 24).unwrap();
        assert!(res.value >= res.f_input - 1e-9);
        assert!(res.max_frac <= res.initial_frac + 2);
        let total: f64 = res.set.iter().map(|u| w[u]).sum();
        assert!(total <= 3.0);
        for ex in &res.exchanges {
            assert!((ex.weighted_before - ex.weighted_after).abs() <= 1e-9);
        }
    }
}
