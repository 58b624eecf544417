//! Value oracles over a finite ground set, query accounting, and the function
//! transforms the solvers need: dummy augmentation, the shifted function that
//! penalizes a reference set, and translation by a fixed prefix.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::set::{Set, MAX_ELEMENTS};

/// Default largest `n` accepted by [`TableFunction`].
pub const DEFAULT_TABLE_CAP: usize = 20;

/// Shared, monotone query counter.
///
/// Clones share the same count, which is how wrappers report queries against
/// the oracle they wrap.
#[derive(Clone, Debug, Default)]
pub struct QueryCounter(Arc<AtomicU64>);

impl QueryCounter {
    pub fn new() -> QueryCounter {
        QueryCounter::default()
    }

    pub fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn add(&self, k: u64) {
        self.0.fetch_add(k, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// A value oracle `f : 2^N -> R`.
///
/// Implementors provide the uncounted [`eval`](SetFunction::eval); callers that
/// participate in query accounting go through [`value`](SetFunction::value).
pub trait SetFunction: Send + Sync {
    /// Number of elements in the ground set this oracle is defined on.
    fn ground_size(&self) -> usize;

    /// Pure evaluation, not counted.
    fn eval(&self, s: Set) -> f64;

    fn counter(&self) -> &QueryCounter;

    /// Counted evaluation: exactly one query per call.
    fn value(&self, s: Set) -> f64 {
        self.counter().bump();
        self.eval(s)
    }

    /// `f(S + u) - f(S)`, two queries.
    fn marginal(&self, u: usize, s: Set) -> f64 {
        self.value(s.with(u)) - self.value(s)
    }

    fn queries(&self) -> u64 {
        self.counter().get()
    }
}

impl<T: SetFunction + ?Sized> SetFunction for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn eval(&self, s: Set) -> f64 {
        (**self).eval(s)
    }
    fn counter(&self) -> &QueryCounter {
        (**self).counter()
    }
}

impl<T: SetFunction + ?Sized> SetFunction for Box<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn eval(&self, s: Set) -> f64 {
        (**self).eval(s)
    }
    fn counter(&self) -> &QueryCounter {
        (**self).counter()
    }
}

impl<T: SetFunction + ?Sized> SetFunction for Arc<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn eval(&self, s: Set) -> f64 {
        (**self).eval(s)
    }
    fn counter(&self) -> &QueryCounter {
        (**self).counter()
    }
}

/// Weighted coverage: `f(S)` is the total weight of universe items covered by `S`.
#[derive(Clone, Debug)]
pub struct CoverageFunction {
    weights: Vec<f64>,
    covers: Vec<u64>,
    counter: QueryCounter,
}

impl CoverageFunction {
    /// `covers[u]` lists the universe items element `u` covers. The universe has
    /// at most 64 items.
    pub fn new(universe_weights: Vec<f64>, covers: &[Vec<usize>]) -> Result<CoverageFunction> {
        if universe_weights.len() > 64 {
            return Err(invalid(format!(
                "coverage universe has {} items, at most 64 supported",
                universe_weights.len()
            )));
        }
        if covers.len() > MAX_ELEMENTS {
            return Err(invalid("coverage ground set larger than 64 elements"));
        }
        if let Some(w) = universe_weights.iter().find(|w| **w < 0.0 || !w.is_finite()) {
            return Err(invalid(format!("coverage weight {w} is negative or not finite")));
        }
        let mut masks = Vec::with_capacity(covers.len());
        for (u, items) in covers.iter().enumerate() {
            let mut m = 0u64;
            for &i in items {
                if i >= universe_weights.len() {
                    return Err(invalid(format!("element {u} covers unknown item {i}")));
                }
                m |= 1u64 << i;
            }
            masks.push(m);
        }
        Ok(CoverageFunction {
            weights: universe_weights,
            covers: masks,
            counter: QueryCounter::new(),
        })
    }
}

impl SetFunction for CoverageFunction {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn eval(&self, s: Set) -> f64 {
        let covered = s
            .iter()
            .filter(|&u| u < self.covers.len())
            .fold(0u64, |acc, u| acc | self.covers[u]);
        Set(covered).iter().map(|i| self.weights[i]).sum()
    }

    fn counter(&self) -> &QueryCounter {
        &self.counter
    }
}

/// Weighted undirected cut: `f(S)` is the weight of edges with exactly one endpoint in `S`.
#[derive(Clone, Debug)]
pub struct CutFunction {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    counter: QueryCounter,
}

impl CutFunction {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<CutFunction> {
        if n > MAX_ELEMENTS {
            return Err(invalid("cut ground set larger than 64 elements"));
        }
        for &(a, b, w) in &edges {
            if a == b {
                return Err(invalid(format!("self-loop on vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(invalid(format!("edge ({a}, {b}) outside ground set of size {n}")));
            }
            if w < 0.0 || !w.is_finite() {
                return Err(invalid(format!("edge weight {w} is negative or not finite")));
            }
        }
        Ok(CutFunction {
            n,
            edges,
            counter: QueryCounter::new(),
        })
    }
}

impl SetFunction for CutFunction {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, s: Set) -> f64 {
        self.edges
            .iter()
            .filter(|&&(a, b, _)| s.contains(a) != s.contains(b))
            .map(|&(_, _, w)| w)
            .sum()
    }

    fn counter(&self) -> &QueryCounter {
        &self.counter
    }
}

/// Explicit lookup table indexed by subset bitmask.
#[derive(Clone, Debug)]
pub struct TableFunction {
    n: usize,
    values: Vec<f64>,
    counter: QueryCounter,
}

impl TableFunction {
    /// `values.len()` must be `2^n` with `n <= DEFAULT_TABLE_CAP`.
    pub fn new(values: Vec<f64>) -> Result<TableFunction> {
        TableFunction::with_cap(values, DEFAULT_TABLE_CAP, false)
    }

    /// Like [`new`](TableFunction::new) but also rejects negative entries.
    pub fn non_negative(values: Vec<f64>) -> Result<TableFunction> {
        TableFunction::with_cap(values, DEFAULT_TABLE_CAP, true)
    }

    pub fn with_cap(values: Vec<f64>, cap: usize, non_negative: bool) -> Result<TableFunction> {
        let len = values.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(invalid(format!("table length {len} is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        if n > cap {
            return Err(invalid(format!("table over {n} elements exceeds cap {cap}")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(invalid(format!("table value {v} is not finite")));
        }
        if non_negative {
            if let Some(v) = values.iter().find(|v| **v < 0.0) {
                return Err(invalid(format!("table value {v} is negative")));
            }
        }
        Ok(TableFunction {
            n,
            values,
            counter: QueryCounter::new(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl SetFunction for TableFunction {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, s: Set) -> f64 {
        self.values[(s.bits() & Set::full(self.n).bits()) as usize]
    }

    fn counter(&self) -> &QueryCounter {
        &self.counter
    }
}

/// `f̄(S) = f(S \ dummies)` over the ground set extended by `n_dummy` trailing dummies.
#[derive(Clone, Debug)]
pub struct DummyAugmented<F> {
    base: F,
    n_dummy: usize,
}

impl<F: SetFunction> DummyAugmented<F> {
    pub fn new(base: F, n_dummy: usize) -> Result<DummyAugmented<F>> {
        if base.ground_size() + n_dummy > MAX_ELEMENTS {
            return Err(invalid("augmented ground set larger than 64 elements"));
        }
        Ok(DummyAugmented { base, n_dummy })
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn n_real(&self) -> usize {
        self.base.ground_size()
    }

    pub fn n_dummy(&self) -> usize {
        self.n_dummy
    }
}

impl<F: SetFunction> SetFunction for DummyAugmented<F> {
    fn ground_size(&self) -> usize {
        self.base.ground_size() + self.n_dummy
    }

    fn eval(&self, s: Set) -> f64 {
        self.base.eval(s.intersection(Set::full(self.base.ground_size())))
    }

    fn counter(&self) -> &QueryCounter {
        self.base.counter()
    }
}

/// `f_{-Z}(S) = f(S) - Σ_{u ∈ Z ∩ S} (f({u}) - f(∅) + 1)`.
///
/// Adding any `u ∈ Z` lowers the value by at least 1; marginals of elements
/// outside `Z` are those of the base function.
#[derive(Clone, Debug)]
pub struct ShiftedFunction<F> {
    base: F,
    z: Set,
    penalty: Vec<f64>,
}

impl<F: SetFunction> ShiftedFunction<F> {
    /// Spends `|Z| + 1` counted queries computing the penalties.
    pub fn new(base: F, z: Set) -> ShiftedFunction<F> {
        let mut penalty = vec![0.0; base.ground_size()];
        if !z.is_empty() {
            let empty = base.value(Set::EMPTY);
            let n = penalty.len();
            for u in z.iter().filter(|&u| u < n) {
                penalty[u] = base.value(Set::singleton(u)) - empty + 1.0;
            }
        }
        ShiftedFunction { base, z, penalty }
    }

    pub fn z(&self) -> Set {
        self.z
    }

    pub fn penalty(&self, u: usize) -> f64 {
        self.penalty.get(u).copied().unwrap_or(0.0)
    }

    pub fn base(&self) -> &F {
        &self.base
    }
}

impl<F: SetFunction> SetFunction for ShiftedFunction<F> {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn eval(&self, s: Set) -> f64 {
        let hit = s.intersection(self.z);
        let shift: f64 = hit.iter().map(|u| self.penalty(u)).sum();
        self.base.eval(s) - shift
    }

    fn counter(&self) -> &QueryCounter {
        self.base.counter()
    }
}

/// `g(S) = f(S ∪ E)`, meaningful on `N \ E`.
#[derive(Clone, Debug)]
pub struct Translated<F> {
    base: F,
    prefix: Set,
}

impl<F: SetFunction> Translated<F> {
    pub fn new(base: F, prefix: Set) -> Translated<F> {
        Translated { base, prefix }
    }

    pub fn prefix(&self) -> Set {
        self.prefix
    }
}

impl<F: SetFunction> SetFunction for Translated<F> {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn eval(&self, s: Set) -> f64 {
        self.base.eval(s.union(self.prefix))
    }

    fn counter(&self) -> &QueryCounter {
        self.base.counter()
    }
}

/// Reads through to `base` but counts queries on a private counter, so that
/// parallel callers keep separate, deterministic tallies and checkers
/// leave the caller's count untouched.
pub struct Metered<'a, F: ?Sized> {
    base: &'a F,
    counter: QueryCounter,
}

impl<'a, F: SetFunction + ?Sized> Metered<'a, F> {
    pub fn new(base: &'a F) -> Metered<'a, F> {
        Metered {
            base,
            counter: QueryCounter::new(),
        }
    }
}

impl<F: SetFunction + ?Sized> SetFunction for Metered<'_, F> {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn eval(&self, s: Set) -> f64 {
        self.base.eval(s)
    }

    fn counter(&self) -> &QueryCounter {
        &self.counter
    }
}

pub fn make_coverage(universe_weights: Vec<f64>, covers: &[Vec<usize>]) -> Result<CoverageFunction> {
    CoverageFunction::new(universe_weights, covers)
}

pub fn make_cut(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<CutFunction> {
    CutFunction::new(n, edges)
}

pub fn make_table(values: Vec<f64>) -> Result<TableFunction> {
    TableFunction::new(values)
}

pub fn augment_with_dummies<F: SetFunction>(f: F, count: usize) -> Result<DummyAugmented<F>> {
    DummyAugmented::new(f, count)
}

pub fn shift_out<F: SetFunction>(f: F, z: Set) -> ShiftedFunction<F> {
    ShiftedFunction::new(f, z)
}

pub fn restrict_translate<F: SetFunction>(f: F, e: Set) -> Translated<F> {
    Translated::new(f, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::validate::submodularity_violation;

    fn seeded_coverage() -> CoverageFunction {
        make_coverage(
            vec![1.0, 2.5, 0.5, 3.0, 1.5],
            &[vec![0, 1], vec![1, 2], vec![3], vec![0, 3, 4], vec![2, 4], vec![1]],
        )
        .unwrap()
    }

    fn seeded_cut() -> CutFunction {
        make_cut(
            6,
            vec![
                (0, 1, 1.0),
                (1, 2, 2.0),
                (2, 3, 0.5),
                (3, 4, 1.5),
                (4, 5, 1.0),
                (0, 5, 2.0),
                (1, 4, 0.75),
            ],
        )
        .unwrap()
    }

    #[test]
    fn coverage_overlap_and_empty() {
        let f = make_coverage(vec![1.0], &[vec![0], vec![0]]).unwrap();
        assert_eq!(f.eval(Set::from_elements([0, 1])), 1.0);
        assert_eq!(f.eval(Set::EMPTY), 0.0);
    }

    #[test]
    fn coverage_rejects_negative_weight() {
        assert!(make_coverage(vec![1.0, -0.5], &[vec![0]]).is_err());
        assert!(make_coverage(vec![1.0], &[vec![3]]).is_err());
    }

    #[test]
    fn coverage_is_submodular_exhaustively() {
        assert_eq!(submodularity_violation(&seeded_coverage(), 1e-9).unwrap(), None);
    }

    #[test]
    fn cut_values() {
        let f = make_cut(2, vec![(0, 1, 1.0)]).unwrap();
        assert_eq!(f.eval(Set::singleton(0)), 1.0);
        let tri = make_cut(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        for u in 0..3 {
            assert_eq!(tri.eval(Set::singleton(u)), 2.0);
        }
        assert_eq!(tri.eval(Set::EMPTY), 0.0);
        assert_eq!(tri.eval(Set::full(3)), 0.0);
        assert!(make_cut(2, vec![(1, 1, 1.0)]).is_err());
    }

    #[test]
    fn table_lookup_and_validation() {
        let f = make_table(vec![0.0, 5.0]).unwrap();
        assert_eq!(f.eval(Set::singleton(0)), 5.0);
        let g = make_table(vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(g.eval(Set::full(2)), 1.0);
        assert!(make_table(vec![0.0, 1.0, 2.0]).is_err());
        assert!(TableFunction::non_negative(vec![0.0, -1.0]).is_err());
        assert!(TableFunction::with_cap(vec![0.0; 8], 2, false).is_err());
        let bad = make_table(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(submodularity_violation(&bad, 1e-9).unwrap().is_some());
    }

    #[test]
    fn counting_is_one_per_value_call_and_shared_by_wrappers() {
        let f = seeded_cut();
        let aug = augment_with_dummies(&f, 3).unwrap();
        aug.value(Set::singleton(7));
        aug.eval(Set::singleton(1));
        assert_eq!(f.queries(), 1);
        let shifted = shift_out(&aug, Set::from_elements([0, 2]));
        let after_setup = f.queries();
        assert_eq!(after_setup, 1 + 3);
        shifted.value(Set::full(4));
        assert_eq!(f.queries(), after_setup + 1);
    }

    #[test]
    fn dummies_are_value_neutral() {
        let f = seeded_cut();
        let aug = augment_with_dummies(&f, 5).unwrap();
        assert_eq!(aug.ground_size(), 11);
        for s in Set::full(6).subsets() {
            for d in 6..11 {
                assert_eq!(aug.eval(s.with(d)), aug.eval(s));
            }
        }
        assert_eq!(aug.eval(Set::range(6, 11)), f.eval(Set::EMPTY));
        assert_eq!(submodularity_violation(&aug, 1e-9).unwrap(), None);
    }

    #[test]
    fn shift_out_formula() {
        let f = seeded_coverage();
        let same = shift_out(&f, Set::EMPTY);
        for s in Set::full(6).subsets() {
            assert_eq!(same.eval(s), f.eval(s));
        }
        let z = Set::from_elements([1, 3]);
        let g = shift_out(&f, z);
        for u in z {
            assert_eq!(g.eval(Set::singleton(u)), f.eval(Set::EMPTY) - 1.0);
        }
        // Z members drop the value by at least 1; others keep base marginals.
        for s in Set::full(6).subsets() {
            for u in 0..6 {
                if s.contains(u) {
                    continue;
                }
                let shifted = g.eval(s.with(u)) - g.eval(s);
                let base = f.eval(s.with(u)) - f.eval(s);
                if z.contains(u) {
                    assert!(shifted <= -1.0 + 1e-12, "u={u} s={s:?} shifted={shifted}");
                } else {
                    assert!((shifted - base).abs() <= 1e-12);
                }
            }
        }
        assert_eq!(submodularity_violation(&g, 1e-9).unwrap(), None);
    }

    #[test]
    fn translate_by_prefix() {
        let f = seeded_cut();
        let id = restrict_translate(&f, Set::EMPTY);
        assert_eq!(id.eval(Set::from_elements([1, 4])), f.eval(Set::from_elements([1, 4])));
        let e = Set::from_elements([0, 3]);
        let g = restrict_translate(&f, e);
        assert_eq!(g.eval(Set::EMPTY), f.eval(e));
        assert_eq!(submodularity_violation(&g, 1e-9).unwrap(), None);
    }
}
