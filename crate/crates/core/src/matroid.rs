//! Matroid independence oracles, rank, the dummy-augmented matroid and the
//! rank-inequality test for the matroid polytope.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::set::{Set, MAX_ELEMENTS};
use crate::setfn::{QueryCounter, SetFunction};

/// Largest ground set scanned by the generic (exhaustive) polytope test.
pub const POLYTOPE_SCAN_LIMIT: usize = 20;

/// An independence oracle over `{0, .., ground_size-1}`.
///
/// [`check`](Matroid::check) is uncounted; [`is_independent`](Matroid::is_independent)
/// bumps the independence-query counter.
pub trait Matroid: Send + Sync {
    fn ground_size(&self) -> usize;

    /// Elements below this id are real; the rest are dummies.
    fn n_real(&self) -> usize {
        self.ground_size()
    }

    fn check(&self, s: Set) -> bool;

    fn counter(&self) -> &QueryCounter;

    fn is_independent(&self, s: Set) -> bool {
        self.counter().bump();
        self.check(s)
    }

    fn queries(&self) -> u64 {
        self.counter().get()
    }

    /// Greedy rank, scanning ascending ids. Counted.
    fn rank_of(&self, s: Set) -> usize {
        greedy_rank(s, |t| self.is_independent(t))
    }

    /// Uncounted rank, for verification.
    fn rank_uncounted(&self, s: Set) -> usize {
        greedy_rank(s, |t| self.check(t))
    }

    /// `rank(N)`.
    fn rank(&self) -> usize {
        self.rank_uncounted(Set::full(self.ground_size()))
    }

    /// `min { rank(A) - x(A) : include ⊆ A, A ∩ exclude = ∅ }`.
    ///
    /// The default scans every such `A`; families with a closed form override it.
    fn min_slack(&self, x: &[f64], include: Set, exclude: Set) -> f64 {
        let free = Set::full(self.ground_size()).difference(include).difference(exclude);
        let mut best = f64::INFINITY;
        for extra in free.subsets() {
            let a = include.union(extra);
            let slack = self.rank_uncounted(a) as f64 - mass(x, a);
            best = best.min(slack);
        }
        best
    }
}

fn greedy_rank(s: Set, mut indep: impl FnMut(Set) -> bool) -> usize {
    let mut t = Set::EMPTY;
    for u in s {
        if indep(t.with(u)) {
            t = t.with(u);
        }
    }
    t.len()
}

/// `x(A)` in ascending element order.
pub fn mass(x: &[f64], a: Set) -> f64 {
    a.iter().map(|u| x.get(u).copied().unwrap_or(0.0)).sum()
}

macro_rules! forward_matroid {
    ($($ty:ty),*) => {$(
        impl<T: Matroid + ?Sized> Matroid for $ty {
            fn ground_size(&self) -> usize { (**self).ground_size() }
            fn n_real(&self) -> usize { (**self).n_real() }
            fn check(&self, s: Set) -> bool { (**self).check(s) }
            fn counter(&self) -> &QueryCounter { (**self).counter() }
            fn rank(&self) -> usize { (**self).rank() }
            fn min_slack(&self, x: &[f64], include: Set, exclude: Set) -> f64 {
                (**self).min_slack(x, include, exclude)
            }
        }
    )*};
}

forward_matroid!(&T, Box<T>, Arc<T>);

/// `S` is independent iff `|S| ≤ k`.
#[derive(Clone, Debug)]
pub struct UniformMatroid {
    n: usize,
    k: usize,
    counter: QueryCounter,
}

impl UniformMatroid {
    pub fn new(n: usize, k: usize) -> Result<UniformMatroid> {
        if n > MAX_ELEMENTS {
            return Err(invalid(format!("uniform matroid on {n} > {MAX_ELEMENTS} elements")));
        }
        if k > n {
            return Err(invalid(format!("uniform matroid rank {k} exceeds n = {n}")));
        }
        Ok(UniformMatroid {
            n,
            k,
            counter: QueryCounter::new(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Matroid for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn check(&self, s: Set) -> bool {
        s.is_subset(Set::full(self.n)) && s.len() <= self.k
    }

    fn counter(&self) -> &QueryCounter {
        &self.counter
    }

    fn rank(&self) -> usize {
        self.k
    }

    fn min_slack(&self, x: &[f64], include: Set, exclude: Set) -> f64 {
        let all = Set::full(self.n).difference(exclude);
        uniform_slack(x, self.k, include, all)
    }
}

/// Closed form of `min { min(k, |A|) - x(A) : include ⊆ A ⊆ all }`.
///
/// `|A| - x(A)` is smallest at `A = include` and `k - x(A)` at `A = all`.
fn uniform_slack(x: &[f64], k: usize, include: Set, all: Set) -> f64 {
    let small = include.len() as f64 - mass(x, include);
    let large = k as f64 - mass(x, all);
    small.min(large)
}

/// One block of a partition matroid.
#[derive(Clone, Debug, PartialEq)]
pub struct Part {
    pub members: Set,
    pub capacity: usize,
}

/// `S` is independent iff `|S ∩ P| ≤ capacity(P)` for every part. Elements in
/// no part are unconstrained.
#[derive(Clone, Debug)]
pub struct PartitionMatroid {
    n: usize,
    parts: Vec<Part>,
    counter: QueryCounter,
}

impl PartitionMatroid {
    pub fn new(n: usize, parts: Vec<Part>) -> Result<PartitionMatroid> {
        if n > MAX_ELEMENTS {
            return Err(invalid(format!("partition matroid on {n} > {MAX_ELEMENTS} elements")));
        }
        let mut seen = Set::EMPTY;
        for p in &parts {
            if !p.members.is_subset(Set::full(n)) {
                return Err(invalid("partition member out of range"));
            }
            if !p.members.is_disjoint(seen) {
                return Err(invalid("partition parts overlap"));
            }
            seen = seen.union(p.members);
        }
        Ok(PartitionMatroid {
            n,
            parts,
            counter: QueryCounter::new(),
        })
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    fn unconstrained(&self) -> Set {
        self.parts
            .iter()
            .fold(Set::full(self.n), |acc, p| acc.difference(p.members))
    }
}

impl Matroid for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn check(&self, s: Set) -> bool {
        s.is_subset(Set::full(self.n)) && self.parts.iter().all(|p| s.intersection(p.members).len() <= p.capacity)
    }

    fn counter(&self) -> &QueryCounter {
        &self.counter
    }

    fn rank(&self) -> usize {
        let parts: usize = self.parts.iter().map(|p| p.capacity.min(p.members.len())).sum();
        parts + self.unconstrained().len()
    }

    fn min_slack(&self, x: &[f64], include: Set, exclude: Set) -> f64 {
        let mut total: f64 = self
            .parts
            .iter()
            .map(|p| {
                let all = p.members.difference(exclude);
                uniform_slack(x, p.capacity, include.intersection(p.members), all)
            })
            .sum();
        let free = include.intersection(self.unconstrained());
        total += free.iter().map(|u| 1.0 - x.get(u).copied().unwrap_or(0.0)).sum::<f64>();
        total
    }
}

/// Edge sets of a multigraph; independent iff acyclic.
#[derive(Clone, Debug)]
pub struct GraphicMatroid {
    edges: Vec<(usize, usize)>,
    vertices: usize,
    counter: QueryCounter,
}

impl GraphicMatroid {
    pub fn new(edges: Vec<(usize, usize)>) -> Result<GraphicMatroid> {
        if edges.len() > MAX_ELEMENTS {
            return Err(invalid(format!(
                "graphic matroid with {} > {MAX_ELEMENTS} edges",
                edges.len()
            )));
        }
        let vertices = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        Ok(GraphicMatroid {
            edges,
            vertices,
            counter: QueryCounter::new(),
        })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

impl Matroid for GraphicMatroid {
    fn ground_size(&self) -> usize {
        self.edges.len()
    }

    fn check(&self, s: Set) -> bool {
        if !s.is_subset(Set::full(self.edges.len())) {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        for e in s {
            let (a, b) = self.edges[e];
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }

    fn counter(&self) -> &QueryCounter {
        &self.counter
    }
}

/// `M̄`: the base matroid extended by trailing dummies, with
/// `S` independent iff `S ∩ N` is independent in `M` and `|S| ≤ rank(M)`.
#[derive(Clone, Debug)]
pub struct AugmentedMatroid<M> {
    base: M,
    n_dummy: usize,
    r: usize,
}

impl<M: Matroid> AugmentedMatroid<M> {
    pub fn new(base: M, n_dummy: usize) -> Result<AugmentedMatroid<M>> {
        if base.ground_size() + n_dummy > MAX_ELEMENTS {
            return Err(invalid("augmented ground set larger than 64 elements"));
        }
        let r = base.rank();
        Ok(AugmentedMatroid { base, n_dummy, r })
    }

    /// Adds `rank(M)` dummies, enough to complete any independent set.
    pub fn with_default_dummies(base: M) -> Result<AugmentedMatroid<M>> {
        let r = base.rank();
        AugmentedMatroid::new(base, r)
    }

    pub fn base(&self) -> &M {
        &self.base
    }

    pub fn n_dummy(&self) -> usize {
        self.n_dummy
    }
}

impl<M: Matroid> Matroid for AugmentedMatroid<M> {
    fn ground_size(&self) -> usize {
        self.base.ground_size() + self.n_dummy
    }

    fn n_real(&self) -> usize {
        self.base.ground_size()
    }

    fn check(&self, s: Set) -> bool {
        s.is_subset(Set::full(self.ground_size()))
            && s.len() <= self.r
            && self.base.check(s.intersection(Set::full(self.base.ground_size())))
    }

    fn counter(&self) -> &QueryCounter {
        self.base.counter()
    }

    fn rank(&self) -> usize {
        self.r
    }
}

/// `rank(A)` over the given matroid.
pub fn rank<M: Matroid + ?Sized>(m: &M, s: Set) -> usize {
    m.rank_of(s)
}

/// Extends an independent `S` to a basis.
///
/// Real elements are tried first in ascending id; with an objective, only
/// those with a non-negative marginal are taken in that pass. Dummies come
/// next, and any element that still fits is added last.
pub fn complete_to_basis<M, F>(m: &M, s: Set, f: Option<&F>) -> Result<Set>
where
    M: Matroid + ?Sized,
    F: SetFunction + ?Sized,
{
    if !m.is_independent(s) {
        return Err(Error::Contract(format!("cannot complete dependent set {s:?}")));
    }
    let r = m.rank();
    let mut out = s;
    let real = Set::full(m.n_real());
    let all = Set::full(m.ground_size());
    let passes = [real, all.difference(real), all];
    for (pass, candidates) in passes.into_iter().enumerate() {
        for u in candidates.difference(out) {
            if out.len() >= r {
                return Ok(out);
            }
            if pass == 0 {
                if let Some(f) = f {
                    if f.marginal(u, out) < 0.0 {
                        continue;
                    }
                }
            }
            if m.is_independent(out.with(u)) {
                out = out.with(u);
            }
        }
    }
    Ok(out)
}

/// `x ∈ P(M)`: every rank inequality `x(A) ≤ rank(A)` holds within `tol`,
/// and `0 ≤ x ≤ 1`.
pub fn in_matroid_polytope<M: Matroid + ?Sized>(m: &M, x: &[f64], tol: f64) -> bool {
    x.iter().all(|&v| (-tol..=1.0 + tol).contains(&v)) && m.min_slack(x, Set::EMPTY, Set::EMPTY) >= -tol
}

/// Exhaustive rank scan, independent of any closed form.
pub fn polytope_scan<M: Matroid + ?Sized>(m: &M, x: &[f64], tol: f64) -> Result<Option<Set>> {
    let n = m.ground_size();
    if n > POLYTOPE_SCAN_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: POLYTOPE_SCAN_LIMIT,
        });
    }
    for a in Set::full(n).subsets() {
        if mass(x, a) > m.rank_uncounted(a) as f64 + tol {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

pub fn make_uniform(n: usize, k: usize) -> Result<UniformMatroid> {
    UniformMatroid::new(n, k)
}

pub fn make_partition(n: usize, parts: Vec<Part>) -> Result<PartitionMatroid> {
    PartitionMatroid::new(n, parts)
}

pub fn make_graphic(edges: Vec<(usize, usize)>) -> Result<GraphicMatroid> {
    GraphicMatroid::new(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfn::{CutFunction, TableFunction};
    use crate::verify::validate::matroid_violation;

    fn s(ids: &[usize]) -> Set {
        Set::from_elements(ids.iter().copied())
    }

    fn triangle() -> GraphicMatroid {
        make_graphic(vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn uniform_extremes_and_exchange() {
        let m0 = make_uniform(4, 0).unwrap();
        assert!(m0.check(Set::EMPTY));
        assert!(Set::full(4).subsets().skip(1).all(|t| !m0.check(t)));
        let m4 = make_uniform(4, 4).unwrap();
        assert!(Set::full(4).subsets().all(|t| m4.check(t)));
        assert_eq!(matroid_violation(&make_uniform(8, 3).unwrap()).unwrap(), None);
        assert!(make_uniform(2, 3).is_err());
    }

    #[test]
    fn partition_cases() {
        let parts = vec![
            Part {
                members: s(&[0, 1, 2]),
                capacity: 1,
            },
            Part {
                members: s(&[3, 4]),
                capacity: 2,
            },
        ];
        let m = make_partition(6, parts).unwrap();
        assert!(m.check(s(&[0, 3, 4, 5])));
        assert!(!m.check(s(&[0, 1])));
        assert_eq!(m.rank(), 4);
        assert_eq!(matroid_violation(&m).unwrap(), None);
        let overlap = vec![
            Part {
                members: s(&[0, 1]),
                capacity: 1,
            },
            Part {
                members: s(&[1, 2]),
                capacity: 1,
            },
        ];
        assert!(make_partition(3, overlap).is_err());
    }

    #[test]
    fn graphic_cases() {
        let m = triangle();
        assert!(m.check(s(&[0])));
        assert!(!m.check(s(&[0, 1, 2])));
        assert_eq!(m.rank_of(Set::full(3)), 2);
        // K4: connected on 4 vertices, rank 3.
        let k4 = make_graphic(vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(k4.rank(), 3);
        assert_eq!(matroid_violation(&k4).unwrap(), None);
    }

    #[test]
    fn rank_basics() {
        let m = make_uniform(5, 3).unwrap();
        assert_eq!(rank(&m, Set::EMPTY), 0);
        assert_eq!(rank(&m, s(&[1, 4])), 2);
        assert!(m.queries() > 0);
    }

    #[test]
    fn augmented_is_matroid_and_caps_size() {
        let aug = AugmentedMatroid::with_default_dummies(triangle()).unwrap();
        assert_eq!(aug.ground_size(), 5);
        assert_eq!(aug.n_real(), 3);
        assert!(aug.check(s(&[0, 3])));
        assert!(!aug.check(s(&[0, 3, 4])));
        assert!(!aug.check(s(&[0, 1, 2])));
        assert_eq!(matroid_violation(&aug).unwrap(), None);
    }

    #[test]
    fn completion() {
        let m = make_uniform(5, 3).unwrap();
        let none: Option<&CutFunction> = None;
        let b = complete_to_basis(&m, s(&[0]), none).unwrap();
        assert_eq!(b, s(&[0, 1, 2]));
        assert_eq!(complete_to_basis(&m, b, none).unwrap(), b);
        assert!(complete_to_basis(&m, s(&[0, 1, 2, 3]), none).is_err());

        // Element 1 has a negative marginal, so a dummy is used instead.
        let f = TableFunction::new(vec![0.0, 1.0, -1.0, 0.0]).unwrap();
        let aug = AugmentedMatroid::new(make_uniform(2, 2).unwrap(), 2).unwrap();
        let b = complete_to_basis(
            &aug,
            Set::EMPTY,
            Some(&crate::setfn::augment_with_dummies(&f, 2).unwrap()),
        )
        .unwrap();
        assert_eq!(b, s(&[0, 2]));
        assert_eq!(b.len(), aug.rank());
    }

    #[test]
    fn polytope_closed_forms_match_scan() {
        let m = make_uniform(2, 1).unwrap();
        assert!(!in_matroid_polytope(&m, &[0.6, 0.6], 1e-12));
        assert!(in_matroid_polytope(&m, &[0.5, 0.5], 1e-12));
        assert!(in_matroid_polytope(&m, &[1.0, 0.0], 1e-12));

        let parts = vec![
            Part {
                members: s(&[0, 1, 2]),
                capacity: 1,
            },
            Part {
                members: s(&[3, 4]),
                capacity: 1,
            },
        ];
        let pm = make_partition(6, parts).unwrap();
        let points: [[f64; 6]; 3] = [
            [0.3, 0.3, 0.3, 0.5, 0.5, 1.0],
            [0.3, 0.3, 0.5, 0.5, 0.5, 1.0],
            [0.0, 0.0, 0.9, 0.9, 0.2, 0.4],
        ];
        for x in points {
            let closed = pm.min_slack(&x, Set::EMPTY, Set::EMPTY);
            let generic = Set::full(6)
                .subsets()
                .map(|a| pm.rank_uncounted(a) as f64 - mass(&x, a))
                .fold(f64::INFINITY, f64::min);
            assert!((closed - generic).abs() < 1e-12, "{closed} vs {generic}");
            assert_eq!(
                in_matroid_polytope(&pm, &x, 1e-12),
                polytope_scan(&pm, &x, 1e-12).unwrap().is_none()
            );
        }
    }
}
