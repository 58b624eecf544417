//! Deterministic pipage rounding of an EME point whose marginal vector lies in
//! the matroid polytope.
//!
//! The point is first relaxed to singleton coordinates, where `F` coincides
//! with the classical multilinear extension. Rounding then alternates two
//! moves, each of which keeps `x ∈ P(M)` and never lowers `F`:
//!
//! * along `e_u` for a fractional `u` in no tight set (`F` is linear there);
//! * along `e_u - e_v` for fractional `u, v` that can move both ways (`F` is
//!   convex there), stopping at the better endpoint.

use serde::{Deserialize, Serialize};

use crate::eme::{eval_f, EmeVector};
use crate::error::{Error, Result};
use crate::matroid::{in_matroid_polytope, Matroid};
use crate::set::Set;
use crate::setfn::SetFunction;

/// Values within this distance of 0 or 1 are snapped; slacks below it count as tight.
pub const SNAP: f64 = 1e-12;

/// Polytope membership tolerance for the precondition.
pub const POLYTOPE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PipageMove {
    Linear {
        element: usize,
        from: f64,
        to: f64,
    },
    Exchange {
        up: usize,
        down: usize,
        t: f64,
        t_min: f64,
        t_max: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipageResult {
    pub set: Set,
    pub value: f64,
    /// `F(y)` of the input point.
    pub f_input: f64,
    pub moves: Vec<PipageMove>,
}

/// Strips dummies (ids `≥ n_real`) and relaxes every real element, yielding
/// singleton coordinates `x_u = Mar_u(y)`.
pub fn to_singletons(y: &EmeVector, n_real: usize) -> EmeVector {
    let mut z = strip(y, n_real);
    for u in 0..n_real {
        z = z.relax(u);
    }
    z
}

fn point(x: &[f64]) -> EmeVector {
    EmeVector::from_coords(x.iter().enumerate().map(|(u, &p)| (Set::singleton(u), p))).expect("x stays in [0, 1]")
}

fn snap(x: &mut [f64]) {
    for v in x.iter_mut() {
        if *v < SNAP {
            *v = 0.0;
        } else if *v > 1.0 - SNAP {
            *v = 1.0;
        }
    }
}

/// Rounds `y` to an independent set `S` of the real matroid `m` with
/// `f(S) ≥ F(y)`. `f` is the real (non-augmented) objective; coordinates of `y`
/// may mention dummies, which are ignored.
pub fn pipage_round<M, F>(m: &M, f: &F, y: &EmeVector, frac_cap: usize) -> Result<PipageResult>
where
    M: Matroid + ?Sized,
    F: SetFunction + ?Sized,
{
    let n = m.ground_size();
    let f_input = eval_f(f, &strip(y, n), frac_cap)?;
    let singles = to_singletons(y, n);
    let mut x = singles.marginal(n).0;
    if !in_matroid_polytope(m, &x, POLYTOPE_TOLERANCE) {
        return Err(Error::Contract("Mar(y) is outside the matroid polytope".into()));
    }
    snap(&mut x);

    let mut moves = Vec::new();
    let max_moves = 4 * n * n + 16;
    let value_at = |x: &[f64]| eval_f(f, &point(x), frac_cap);

    loop {
        let frac: Vec<usize> = (0..n).filter(|&u| x[u] > 0.0 && x[u] < 1.0).collect();
        if frac.is_empty() {
            break;
        }
        if moves.len() >= max_moves {
            return Err(Error::Contract(format!(
                "pipage did not converge within {max_moves} moves"
            )));
        }

        if let Some(mv) = linear_move(m, &mut x, &frac, &value_at)? {
            moves.push(mv);
        } else if let Some(mv) = exchange_move(m, &mut x, &frac, &value_at)? {
            moves.push(mv);
        } else {
            return Err(Error::Contract(
                "pipage found no feasible move at a fractional point".into(),
            ));
        }
        snap(&mut x);
    }

    let set: Set = (0..n).filter(|&u| x[u] == 1.0).collect();
    if !m.is_independent(set) {
        return Err(Error::Contract(format!("pipage produced dependent set {set:?}")));
    }
    Ok(PipageResult {
        set,
        value: f.value(set),
        f_input,
        moves,
    })
}

fn strip(y: &EmeVector, n_real: usize) -> EmeVector {
    let real = Set::full(n_real);
    EmeVector::from_coords(y.coords().map(|(s, p)| (s.intersection(real), p)))
        .expect("probabilities come from a valid vector")
        .join(y.sure().intersection(real))
}

type ValueAt<'a> = dyn Fn(&[f64]) -> Result<f64> + 'a;

fn linear_move<M: Matroid + ?Sized>(
    m: &M,
    x: &mut [f64],
    frac: &[usize],
    value_at: &ValueAt<'_>,
) -> Result<Option<PipageMove>> {
    for &u in frac {
        let room = (1.0 - x[u]).min(m.min_slack(x, Set::singleton(u), Set::EMPTY));
        if room <= SNAP {
            continue;
        }
        let from = x[u];
        let mut lo = x.to_vec();
        lo[u] = 0.0;
        let mut hi = x.to_vec();
        hi[u] = from + room;
        let to = if value_at(&hi)? >= value_at(&lo)? { hi[u] } else { 0.0 };
        x[u] = to;
        return Ok(Some(PipageMove::Linear { element: u, from, to }));
    }
    Ok(None)
}

fn exchange_move<M: Matroid + ?Sized>(
    m: &M,
    x: &mut [f64],
    frac: &[usize],
    value_at: &ValueAt<'_>,
) -> Result<Option<PipageMove>> {
    for (a, &u) in frac.iter().enumerate() {
        for &v in &frac[a + 1..] {
            let (su, sv) = (Set::singleton(u), Set::singleton(v));
            let t_max = (1.0 - x[u]).min(x[v]).min(m.min_slack(x, su, sv));
            let t_min = -(x[u].min(1.0 - x[v]).min(m.min_slack(x, sv, su)));
            if t_max <= SNAP || t_min >= -SNAP {
                continue;
            }
            let at = |t: f64| {
                let mut z = x.to_vec();
                z[u] += t;
                z[v] -= t;
                z
            };
            let (hi, lo) = (at(t_max), at(t_min));
            let t = if value_at(&hi)? >= value_at(&lo)? { t_max } else { t_min };
            x[u] += t;
            x[v] -= t;
            return Ok(Some(PipageMove::Exchange {
                up: u,
                down: v,
                t,
                t_min,
                t_max,
            }));
        }
    }
    Ok(None)
}
