//! Sparse vectors over the subsets of the ground set and exact evaluation of
//! the extended multilinear extension
//!
//! ```text
//! F(y) = E[f(R(y))],   R(y) = ⋃ { S : coordinate S is drawn },
//! ```
//!
//! where each coordinate `S` is drawn independently with probability `y_S`.
//!
//! Coordinates at probability 1 are folded into a single *sure set*; only
//! strictly fractional coordinates are stored, so exact evaluation enumerates
//! `2^frac(y)` realizations.
//!
//! Evaluation order is fixed: coordinates are ordered by ascending subset
//! mask, realization `k` draws coordinate `j` iff bit `j` of `k` is set, the
//! low [`CHUNK_BITS`] bits of `k` are summed sequentially inside a chunk, and
//! chunk totals are combined by a pairwise tree of fixed shape. Sequential and
//! parallel evaluation therefore produce bit-identical results.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::set::Set;
use crate::setfn::{QueryCounter, SetFunction};

/// Default largest `frac(y)` accepted by exact evaluation.
pub const DEFAULT_FRAC_CAP: usize = 24;

/// Coordinates at or below this probability are dropped as zero.
pub const DUST: f64 = 1e-15;

/// Realization bits summed sequentially within one chunk.
pub const CHUNK_BITS: usize = 10;

/// A point `y ∈ [0,1]^{2^N}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmeVector {
    coords: BTreeMap<Set, f64>,
    sure: Set,
}

impl EmeVector {
    pub fn zero() -> EmeVector {
        EmeVector::default()
    }

    /// `e_S`.
    pub fn indicator(s: Set) -> EmeVector {
        EmeVector {
            coords: BTreeMap::new(),
            sure: s,
        }
    }

    /// Builds a vector from explicit coordinates. Coordinates listed twice are
    /// combined with the probabilistic sum.
    pub fn from_coords<I: IntoIterator<Item = (Set, f64)>>(coords: I) -> Result<EmeVector> {
        let mut y = EmeVector::zero();
        for (s, p) in coords {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("coordinate probability {p} outside [0, 1]")));
            }
            y.absorb(s, p);
        }
        y.normalize();
        Ok(y)
    }

    /// Union of all coordinates held at probability 1.
    pub fn sure(&self) -> Set {
        self.sure
    }

    /// Strictly fractional coordinates in canonical order.
    pub fn coords(&self) -> impl Iterator<Item = (Set, f64)> + '_ {
        self.coords.iter().map(|(&s, &p)| (s, p))
    }

    pub fn frac(&self) -> usize {
        self.coords.len()
    }

    pub fn supp(&self) -> usize {
        self.coords.len() + usize::from(!self.sure.is_empty())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.is_empty()
    }

    /// Every element appearing in some coordinate or in the sure set.
    pub fn elements(&self) -> Set {
        self.coords.keys().fold(self.sure, |acc, &s| acc.union(s))
    }

    /// `y_S`. A nonempty subset of the sure set reads as 1, which is value-equivalent.
    pub fn prob(&self, s: Set) -> f64 {
        if !s.is_empty() && s.is_subset(self.sure) {
            1.0
        } else {
            self.coords.get(&s).copied().unwrap_or(0.0)
        }
    }

    /// Copy with coordinate `S` overwritten by `p`.
    ///
    /// Fails if `S` lies inside the sure set and `p < 1`: a folded coordinate
    /// cannot be lowered without knowing which coordinates formed the sure set.
    pub fn with_coord(&self, s: Set, p: f64) -> Result<EmeVector> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("coordinate probability {p} outside [0, 1]")));
        }
        if s.is_empty() {
            return Ok(self.clone());
        }
        if s.is_subset(self.sure) {
            return if p >= 1.0 {
                Ok(self.clone())
            } else {
                Err(Error::Contract(format!("coordinate {s:?} is folded into the sure set")))
            };
        }
        let mut out = self.clone();
        out.coords.remove(&s);
        out.absorb(s, p);
        out.normalize();
        Ok(out)
    }

    /// Combine `p` into coordinate `S` with the probabilistic sum. Does not prune.
    fn absorb(&mut self, s: Set, p: f64) {
        if s.is_empty() || p <= DUST {
            return;
        }
        if p >= 1.0 {
            self.sure = self.sure.union(s);
            self.coords.remove(&s);
            return;
        }
        let merged = match self.coords.get(&s) {
            Some(&q) => 1.0 - (1.0 - q) * (1.0 - p),
            None => p,
        };
        if merged >= 1.0 {
            self.coords.remove(&s);
            self.sure = self.sure.union(s);
        } else {
            self.coords.insert(s, merged);
        }
    }

    /// Drops dust and coordinates made redundant by the sure set.
    fn normalize(&mut self) {
        let sure = self.sure;
        self.coords.retain(|s, p| *p > DUST && !s.is_subset(sure));
    }

    /// `Mar(y)` over elements `0..n`.
    pub fn marginal(&self, n: usize) -> MarginalVector {
        let mut keep = vec![1.0f64; n];
        let mut first = vec![f64::NAN; n];
        let mut count = vec![0usize; n];
        for (s, p) in self.coords() {
            for u in s.iter().filter(|&u| u < n) {
                keep[u] *= 1.0 - p;
                if count[u] == 0 {
                    first[u] = p;
                }
                count[u] += 1;
            }
        }
        let values = (0..n)
            .map(|u| {
                if self.sure.contains(u) {
                    1.0
                } else {
                    match count[u] {
                        0 => 0.0,
                        1 => first[u],
                        _ => 1.0 - keep[u],
                    }
                }
            })
            .collect();
        MarginalVector(values)
    }

    /// `Mar_u(y)`.
    pub fn marginal_of(&self, u: usize) -> f64 {
        self.marginal(u + 1).0[u]
    }

    /// Coordinate-wise probabilistic sum `y ⊕ z`.
    pub fn prob_sum(&self, other: &EmeVector) -> EmeVector {
        let mut out = self.clone();
        out.sure = out.sure.union(other.sure);
        for (s, p) in other.coords() {
            out.absorb(s, p);
        }
        out.normalize();
        out
    }

    /// `e_A ∨ y`.
    pub fn join(&self, a: Set) -> EmeVector {
        let mut out = self.clone();
        out.sure = out.sure.union(a);
        out.normalize();
        out
    }

    /// Folds every coordinate containing `u` into the singleton `{u}`.
    ///
    /// `y_{u}` becomes `Mar_u(y)` and each `S + u` (`S` nonempty) is merged into
    /// `S`. Preserves `Mar`, never decreases `F` for submodular `f`, and grows
    /// `frac` by at most one.
    pub fn relax(&self, u: usize) -> EmeVector {
        let mar_u = self.marginal_of(u);
        let single = Set::singleton(u);
        let mut out = EmeVector::indicator(self.sure);
        for (s, p) in self.coords() {
            if !s.contains(u) {
                out.absorb(s, p);
            } else if s != single {
                out.absorb(s.without(u), p);
            }
        }
        out.coords.remove(&single);
        out.absorb(single, mar_u);
        out.normalize();
        out
    }

    fn check_budget(&self, cap: usize) -> Result<()> {
        if self.frac() > cap {
            Err(Error::Budget { frac: self.frac(), cap })
        } else {
            Ok(())
        }
    }
}

/// `Mar(y)`: per-element inclusion probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalVector(pub Vec<f64>);

impl MarginalVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, u: usize) -> f64 {
        self.0.get(u).copied().unwrap_or(0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn linf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, &x| m.max(x))
    }

    /// `‖Mar ∧ 1_A‖∞`.
    pub fn linf_on(&self, a: Set) -> f64 {
        a.iter().map(|u| self.get(u)).fold(0.0, f64::max)
    }

    /// `Σ_u Mar_u · w(u)` in ascending element order.
    pub fn weighted_sum(&self, weights: &[f64]) -> f64 {
        self.0.iter().zip(weights).map(|(x, w)| x * w).sum()
    }

    pub fn prob_sum(&self, other: &MarginalVector) -> MarginalVector {
        let n = self.len().max(other.len());
        MarginalVector(
            (0..n)
                .map(|u| 1.0 - (1.0 - self.get(u)) * (1.0 - other.get(u)))
                .collect(),
        )
    }
}

/// `Mar(y)` over elements `0..n`.
pub fn marginal(y: &EmeVector, n: usize) -> MarginalVector {
    y.marginal(n)
}

pub fn prob_sum(y1: &EmeVector, y2: &EmeVector) -> EmeVector {
    y1.prob_sum(y2)
}

pub fn join(y: &EmeVector, a: Set) -> EmeVector {
    y.join(a)
}

pub fn relax(y: &EmeVector, u: usize) -> EmeVector {
    y.relax(u)
}

/// Exact `F(y)` with counted queries, one per realization.
pub fn eval_f<F: SetFunction + ?Sized>(f: &F, y: &EmeVector, cap: usize) -> Result<f64> {
    y.check_budget(cap)?;
    Ok(expectation(f, y, true))
}

/// Exact `F(y)` without touching the query counter, for verification.
pub fn eval_f_uncounted<F: SetFunction + ?Sized>(f: &F, y: &EmeVector, cap: usize) -> Result<f64> {
    y.check_budget(cap)?;
    Ok(expectation(f, y, false))
}

/// `g_y(A) = F(e_A ∨ y)`.
pub fn eval_joined<F: SetFunction + ?Sized>(f: &F, y: &EmeVector, a: Set, cap: usize) -> Result<f64> {
    eval_f(f, &y.join(a), cap)
}

/// `∂F/∂y_S` from the endpoint identity `(1 - y_S)·∂F/∂y_S = F(e_S ∨ y) - F(y)`.
pub fn partial_derivative<F: SetFunction + ?Sized>(f: &F, y: &EmeVector, s: Set, cap: usize) -> Result<f64> {
    let ys = y.prob(s);
    if ys >= 1.0 {
        return Err(Error::UndefinedDerivative);
    }
    let joined = eval_joined(f, y, s, cap)?;
    let base = eval_f(f, y, cap)?;
    Ok((joined - base) / (1.0 - ys))
}

/// `g_y(S) = F(e_S ∨ y)` as a set function.
///
/// Each counted query of `g` spends `2^frac(y)` counted queries of `f`;
/// [`counter`](SetFunction::counter) tracks calls to `g` itself.
pub struct JoinedExtension<'a, F: ?Sized> {
    f: &'a F,
    y: &'a EmeVector,
    calls: QueryCounter,
}

impl<'a, F: SetFunction + ?Sized> JoinedExtension<'a, F> {
    pub fn new(f: &'a F, y: &'a EmeVector, cap: usize) -> Result<JoinedExtension<'a, F>> {
        y.check_budget(cap)?;
        Ok(JoinedExtension {
            f,
            y,
            calls: QueryCounter::new(),
        })
    }

    pub fn point(&self) -> &EmeVector {
        self.y
    }
}

impl<F: SetFunction + ?Sized> SetFunction for JoinedExtension<'_, F> {
    fn ground_size(&self) -> usize {
        self.f.ground_size()
    }

    fn eval(&self, s: Set) -> f64 {
        expectation(self.f, &self.y.join(s), false)
    }

    fn counter(&self) -> &QueryCounter {
        &self.calls
    }

    fn value(&self, s: Set) -> f64 {
        self.calls.bump();
        expectation(self.f, &self.y.join(s), true)
    }
}

/// `F(y)` summed in the canonical order described at the top of this module.
pub(crate) fn expectation<F: SetFunction + ?Sized>(f: &F, y: &EmeVector, counted: bool) -> f64 {
    let coords: Vec<(Set, f64)> = y.coords().collect();
    let m = coords.len();
    let low_bits = m.min(CHUNK_BITS);
    let (low, high) = coords.split_at(low_bits);
    let low_table = pattern_table(low, y.sure);

    let chunk = |h: usize| -> f64 {
        let (wh, sh) = pattern(high, h, Set::EMPTY);
        let mut acc = 0.0;
        for &(wl, sl) in &low_table {
            let set = sl.union(sh);
            acc += wl * if counted { f.value(set) } else { f.eval(set) };
        }
        wh * acc
    };

    let n_chunks = 1usize << high.len();
    let sums: Vec<f64> = if n_chunks >= 4 {
        (0..n_chunks).into_par_iter().map(chunk).collect()
    } else {
        (0..n_chunks).map(chunk).collect()
    };
    tree_sum(sums)
}

fn pattern(coords: &[(Set, f64)], k: usize, base: Set) -> (f64, Set) {
    let mut w = 1.0;
    let mut s = base;
    for (j, &(cs, p)) in coords.iter().enumerate() {
        if k >> j & 1 == 1 {
            w *= p;
            s = s.union(cs);
        } else {
            w *= 1.0 - p;
        }
    }
    (w, s)
}

fn pattern_table(coords: &[(Set, f64)], base: Set) -> Vec<(f64, Set)> {
    (0..1usize << coords.len()).map(|k| pattern(coords, k, base)).collect()
}

/// Pairwise reduction with a shape that depends only on the input length.
pub(crate) fn tree_sum(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    while v.len() > 1 {
        v = v
            .chunks(2)
            .map(|c| if c.len() == 2 { c[0] + c[1] } else { c[0] })
            .collect();
    }
    v[0]
}

/// JSON debug dump: `{ "sure": [ids], "coords": [ {"set": [ids], "p": real} ] }`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EmeDump {
    sure: Set,
    coords: Vec<CoordDump>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoordDump {
    set: Set,
    p: f64,
}

impl Serialize for EmeVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EmeDump {
            sure: self.sure,
            coords: self.coords().map(|(set, p)| CoordDump { set, p }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EmeVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dump = EmeDump::deserialize(d)?;
        let mut y =
            EmeVector::from_coords(dump.coords.into_iter().map(|c| (c.set, c.p))).map_err(serde::de::Error::custom)?;
        y.sure = y.sure.union(dump.sure);
        y.normalize();
        Ok(y)
    }
}
