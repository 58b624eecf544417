//! Exhaustive structural validators for objectives and matroids.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::set::Set;
use crate::setfn::SetFunction;

/// Largest ground set scanned by [`submodularity_violation`].
pub const SUBMODULARITY_SCAN_LIMIT: usize = 16;

/// Largest ground set scanned by [`matroid_violation`].
pub const MATROID_SCAN_LIMIT: usize = 12;

/// A witness `f(A+u) + f(A+v) < f(A+u+v) + f(A) - tol`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubmodularityViolation {
    pub base: Set,
    pub u: usize,
    pub v: usize,
    pub lhs: f64,
    pub rhs: f64,
}

/// Scans the local form of submodularity, which is equivalent to
/// `f(A) + f(B) ≥ f(A∪B) + f(A∩B)` for all pairs. Uses uncounted evaluation.
pub fn submodularity_violation<F: SetFunction + ?Sized>(f: &F, tol: f64) -> Result<Option<SubmodularityViolation>> {
    let n = f.ground_size();
    if n > SUBMODULARITY_SCAN_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: SUBMODULARITY_SCAN_LIMIT,
        });
    }
    let table: Vec<f64> = Set::full(n).subsets().map(|s| f.eval(s)).collect();
    let at = |s: Set| table[s.bits() as usize];
    for a in Set::full(n).subsets() {
        let rest = Set::full(n).difference(a);
        for u in rest {
            for v in rest.difference(Set::full(u + 1)) {
                let lhs = at(a.with(u)) + at(a.with(v));
                let rhs = at(a.with(u).with(v)) + at(a);
                if lhs < rhs - tol {
                    return Ok(Some(SubmodularityViolation {
                        base: a,
                        u,
                        v,
                        lhs,
                        rhs,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Returns a description of the first matroid axiom that fails, if any.
pub fn matroid_violation<M: Matroid + ?Sized>(m: &M) -> Result<Option<String>> {
    let n = m.ground_size();
    if n > MATROID_SCAN_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: MATROID_SCAN_LIMIT,
        });
    }
    if !m.check(Set::EMPTY) {
        return Ok(Some("empty set is dependent".into()));
    }
    let indep: Vec<bool> = Set::full(n).subsets().map(|s| m.check(s)).collect();
    let is = |s: Set| indep[s.bits() as usize];
    for b in Set::full(n).subsets().filter(|&b| is(b)) {
        for u in b {
            if !is(b.without(u)) {
                return Ok(Some(format!(
                    "downward closure fails: {b:?} independent, {:?} not",
                    b.without(u)
                )));
            }
        }
    }
    // With downward closure, exchange for |B| = |A| + 1 implies the general axiom.
    for a in Set::full(n).subsets().filter(|&a| is(a)) {
        let outside = Set::full(n).difference(a);
        for b in Set::full(n).subsets().filter(|&b| is(b) && b.len() == a.len() + 1) {
            let ok = b.difference(a).intersection(outside).iter().any(|u| is(a.with(u)));
            if !ok {
                return Ok(Some(format!("exchange fails for A = {a:?}, B = {b:?}")));
            }
        }
    }
    Ok(None)
}

/// Checks `f(S) ≥ 0` on every subset.
pub fn negativity_witness<F: SetFunction + ?Sized>(f: &F, tol: f64) -> Result<Option<Set>> {
    let n = f.ground_size();
    if n > SUBMODULARITY_SCAN_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: SUBMODULARITY_SCAN_LIMIT,
        });
    }
    Ok(Set::full(n).subsets().find(|&s| f.eval(s) < -tol))
}
