//! Seeded fixtures shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use submax_core::instance::{generate, ConstraintKind, Family, Kind};
use submax_core::{EmeVector, Set, SetFunction};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Objective of a generated instance from a random family.
pub fn random_function(rng: &mut ChaCha8Rng, n: usize) -> Box<dyn SetFunction> {
    let family = *Family::ALL.choose(rng).unwrap();
    let kind = Kind {
        family,
        constraint: ConstraintKind::Uniform,
    };
    generate(kind, n, rng.gen()).unwrap().function().unwrap()
}

/// Nonempty subset of `0..n` with 1 to 3 elements.
pub fn random_set(rng: &mut ChaCha8Rng, n: usize) -> Set {
    let k = rng.gen_range(1..=3.min(n));
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    Set::from_elements(ids[..k].iter().copied())
}

/// A vector over `0..n` with at most `max_frac` fractional coordinates and,
/// sometimes, a nonempty sure set.
pub fn random_eme(rng: &mut ChaCha8Rng, n: usize, max_frac: usize) -> EmeVector {
    let k = rng.gen_range(1..=max_frac);
    let mut coords: Vec<(Set, f64)> = (0..k)
        .map(|_| (random_set(rng, n), rng.gen_range(0.02..0.98)))
        .collect();
    if rng.gen_bool(0.2) {
        coords.push((Set::singleton(rng.gen_range(0..n)), 1.0));
    }
    EmeVector::from_coords(coords).unwrap()
}
