//! Lovász extension `f̂(x) = ∫₀¹ f({u : x_u ≥ λ}) dλ`.

use crate::set::Set;
use crate::setfn::SetFunction;

/// Sort-and-telescope evaluation. Uncounted.
pub fn lovasz<F: SetFunction + ?Sized>(f: &F, x: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    let mut total = 0.0;
    let mut prefix = Set::EMPTY;
    let mut prev = 1.0;
    for &u in &order {
        total += (prev - x[u]) * f.eval(prefix);
        prefix = prefix.with(u);
        prev = x[u];
    }
    total + prev * f.eval(prefix)
}
