//! Bitmask subsets of a ground set with at most 64 elements.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest ground set a [`Set`] can index.
pub const MAX_ELEMENTS: usize = 64;

/// A subset of `{0, .., 63}` stored as a bitmask.
///
/// Ordering is the numeric order of the mask, which is the canonical order used
/// for EME coordinates and for every exhaustive scan.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Set(pub u64);

impl Set {
    pub const EMPTY: Set = Set(0);

    pub fn singleton(u: usize) -> Set {
        debug_assert!(u < MAX_ELEMENTS);
        Set(1u64 << u)
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Set {
        debug_assert!(n <= MAX_ELEMENTS);
        if n == MAX_ELEMENTS {
            Set(u64::MAX)
        } else {
            Set((1u64 << n) - 1)
        }
    }

    /// `{lo, .., hi-1}`.
    pub fn range(lo: usize, hi: usize) -> Set {
        Set(Set::full(hi).0 & !Set::full(lo).0)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(it: I) -> Set {
        it.into_iter().fold(Set::EMPTY, |s, u| s.with(u))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, u: usize) -> bool {
        u < MAX_ELEMENTS && self.0 >> u & 1 == 1
    }

    pub fn with(self, u: usize) -> Set {
        Set(self.0 | 1u64 << u)
    }

    pub fn without(self, u: usize) -> Set {
        Set(self.0 & !(1u64 << u))
    }

    pub fn union(self, other: Set) -> Set {
        Set(self.0 | other.0)
    }

    pub fn intersection(self, other: Set) -> Set {
        Set(self.0 & other.0)
    }

    pub fn difference(self, other: Set) -> Set {
        Set(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Set) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Set) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest element, if any.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Elements in ascending order.
    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self`, in ascending mask order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }
}

impl fmt::Debug for Set {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for Set {
    fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Self {
        Set::from_elements(it)
    }
}

impl IntoIterator for Set {
    type Item = usize;
    type IntoIter = Elements;
    fn into_iter(self) -> Elements {
        self.iter()
    }
}

pub struct Elements(u64);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let u = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(u)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

/// Iterates the submasks of a mask in increasing numeric order.
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Set;

    fn next(&mut self) -> Option<Set> {
        let cur = self.next?;
        // Increment within the mask: set all non-mask bits, add one, clear them again.
        self.next = if cur == self.mask {
            None
        } else {
            Some(((cur | !self.mask).wrapping_add(1)) & self.mask)
        };
        Some(Set(cur))
    }
}

impl Serialize for Set {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Set {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = ids.iter().find(|&&u| u >= MAX_ELEMENTS) {
            return Err(serde::de::Error::custom(format!(
                "element id {bad} out of range (max {})",
                MAX_ELEMENTS - 1
            )));
        }
        Ok(Set::from_elements(ids))
    }
}

/// Real elements followed by a contiguous tail of dummies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundSet {
    pub n_real: usize,
    pub n_dummy: usize,
}

impl GroundSet {
    pub fn new(n_real: usize, n_dummy: usize) -> GroundSet {
        GroundSet { n_real, n_dummy }
    }

    pub fn len(&self) -> usize {
        self.n_real + self.n_dummy
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_dummy(&self, u: usize) -> bool {
        u >= self.n_real && u < self.len()
    }

    pub fn real(&self) -> Set {
        Set::full(self.n_real)
    }

    pub fn dummies(&self) -> Set {
        Set::range(self.n_real, self.len())
    }

    pub fn all(&self) -> Set {
        Set::full(self.len())
    }
}
