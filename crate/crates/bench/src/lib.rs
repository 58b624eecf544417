//! Fixtures shared by the benchmarks.

use submax_core::instance::{generate, ConstraintKind, Family, Instance, Kind};
use submax_core::{EmeVector, Set};

pub fn instance(family: Family, constraint: ConstraintKind, n: usize) -> Instance {
    generate(Kind { family, constraint }, n, 42).expect("benchmark instance")
}

/// `frac` singleton and pair coordinates over `0..n`, all at 0.3.
pub fn vector(n: usize, frac: usize) -> EmeVector {
    let coords = (0..frac).map(|k| {
        let s = if k < n {
            Set::singleton(k)
        } else {
            Set::from_elements([k % n, (k + 1 + k / n) % n])
        };
        (s, 0.3)
    });
    EmeVector::from_coords(coords).expect("probabilities in range")
}
