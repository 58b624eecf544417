//! Independent oracles for `F(y)`: a seeded sampler and an exact
//! distribution-by-dynamic-programming evaluation. Test-only; the solvers
//! never call these.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eme::EmeVector;
use crate::set::Set;
use crate::setfn::SetFunction;

/// One realization of `R(y)`. The stream is keyed by `(seed, sample)` and
/// draws one uniform per coordinate in canonical order.
pub fn sample_r(y: &EmeVector, seed: u64, sample: u64) -> Set {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    let mut r = y.sure();
    for (s, p) in y.coords() {
        if rng.gen::<f64>() < p {
            r = r.union(s);
        }
    }
    r
}

/// Sample mean of `f(R(y))` and its standard error.
pub fn mc_estimate<F: SetFunction + ?Sized>(f: &F, y: &EmeVector, samples: u64, seed: u64) -> (f64, f64) {
    assert!(samples >= 1, "at least one sample");
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for k in 0..samples {
        let v = f.eval(sample_r(y, seed, k));
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    if samples == 1 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

/// Exact law of `R(y)`, built one coordinate at a time.
pub fn distribution(y: &EmeVector) -> BTreeMap<Set, f64> {
    let mut dist = BTreeMap::from([(y.sure(), 1.0)]);
    for (s, p) in y.coords() {
        let mut next = BTreeMap::new();
        for (&a, &q) in &dist {
            *next.entry(a).or_insert(0.0) += q * (1.0 - p);
            *next.entry(a.union(s)).or_insert(0.0) += q * p;
        }
        dist = next;
    }
    dist
}

/// `Σ_A Pr[R(y) = A]·f(A)` from [`distribution`]. Uncounted.
pub fn exact_by_distribution<F: SetFunction + ?Sized>(f: &F, y: &EmeVector) -> f64 {
    distribution(y).into_iter().map(|(a, q)| q * f.eval(a)).sum()
}
