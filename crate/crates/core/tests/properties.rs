mod common;

use proptest::prelude::*;

use common::{random_eme, random_function, random_set, rng};
use submax_core::config::TOLERANCE;
use submax_core::eme::eval_f_uncounted;
use submax_core::instance::{generate, Instance, Kind};
use submax_core::report::canonical_json;
use submax_core::setfn::{restrict_translate, shift_out};
use submax_core::verify::validate::{matroid_violation, submodularity_violation};
use submax_core::verify::{exact_by_distribution, lovasz};
use submax_core::{EmeVector, Set, SetFunction};

const CAP: usize = 24;

fn f_of<F: SetFunction + ?Sized>(f: &F, y: &EmeVector) -> f64 {
    eval_f_uncounted(f, y, CAP).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_are_valid(kind_idx in 0usize..12, n in 2usize..=10, seed: u64) {
        let kind = Kind::all()[kind_idx];
        let inst = generate(kind, n, seed).unwrap();
        let f = inst.function().unwrap();
        prop_assert!(submodularity_violation(&f, TOLERANCE).unwrap().is_none());
        if inst.is_matroid() {
            let m = inst.matroid().unwrap();
            if m.ground_size() <= 12 {
                prop_assert!(matroid_violation(&m).unwrap().is_none());
            }
        }
        let back = Instance::from_json(&inst.to_json()).unwrap();
        prop_assert_eq!(back.digest(), inst.digest());
    }

    #[test]
    fn exact_evaluation_matches_distribution(seed: u64, n in 3usize..=9) {
        let mut r = rng(seed);
        let f = random_function(&mut r, n);
        let y = random_eme(&mut r, n, 8);
        prop_assert!(close(f_of(&f, &y), exact_by_distribution(&f, &y), 1e-12));
    }

    #[test]
    fn prob_sum_is_a_commutative_monoid(seed: u64, n in 3usize..=9) {
        let mut r = rng(seed);
        let f = random_function(&mut r, n);
        let (a, b, c) = (random_eme(&mut r, n, 4), random_eme(&mut r, n, 4), random_eme(&mut r, n, 4));
        prop_assert_eq!(a.prob_sum(&EmeVector::zero()), a.clone());
        prop_assert!(close(f_of(&f, &a.prob_sum(&b)), f_of(&f, &b.prob_sum(&a)), 1e-12));
        let left = a.prob_sum(&b).prob_sum(&c);
        let right = a.prob_sum(&b.prob_sum(&c));
        let (ml, mr) = (left.marginal(n), right.marginal(n));
        for u in 0..n {
            prop_assert!((ml.get(u) - mr.get(u)).abs() <= 1e-12);
        }
        prop_assert!(close(f_of(&f, &left), f_of(&f, &right), 1e-12));
    }

    #[test]
    fn marginal_is_a_homomorphism(seed: u64, n in 3usize..=10) {
        let mut r = rng(seed);
        let (a, b) = (random_eme(&mut r, n, 6), random_eme(&mut r, n, 6));
        let joint = a.prob_sum(&b).marginal(n);
        let split = a.marginal(n).prob_sum(&b.marginal(n));
        for u in 0..n {
            prop_assert!((joint.get(u) - split.get(u)).abs() <= 1e-12);
        }
    }

    #[test]
    fn join_dominates_for_monotone_direction(seed: u64, n in 3usize..=9) {
        // F(e_A ∨ y) is F of y with A forced in; for A ⊆ sure it is F(y).
        let mut r = rng(seed);
        let f = random_function(&mut r, n);
        let y = random_eme(&mut r, n, 6);
        prop_assert!(close(f_of(&f, &y.join(y.sure())), f_of(&f, &y), 1e-12));
        let a = random_set(&mut r, n);
        let joined = y.join(a);
        prop_assert!(a.is_subset(joined.sure()));
        prop_assert!(joined.frac() <= y.frac());
    }

    #[test]
    fn relax_keeps_marginals_and_does_not_lower_f(seed: u64, n in 3usize..=10, u in 0usize..10) {
        let mut r = rng(seed);
        let f = random_function(&mut r, n);
        let y = random_eme(&mut r, n, 8);
        let u = u % n;
        let z = y.relax(u);
        let (a, b) = (y.marginal(n), z.marginal(n));
        for v in 0..n {
            prop_assert!((a.get(v) - b.get(v)).abs() <= 1e-12);
        }
        prop_assert!(f_of(&f, &z) >= f_of(&f, &y) - TOLERANCE);
        prop_assert!(z.frac() <= y.frac() + 1);
        // Afterwards u appears only in its singleton coordinate.
        prop_assert!(z.coords().all(|(s, _)| !s.contains(u) || s == Set::singleton(u)));
    }

    #[test]
    fn multilinear_dominates_lovasz(seed: u64, n in 2usize..=9) {
        let mut r = rng(seed);
        let f = random_function(&mut r, n);
        let x: Vec<f64> = (0..n).map(|_| rand::Rng::gen_range(&mut r, 0.0..=1.0)).collect();
        let y = EmeVector::from_coords(x.iter().enumerate().map(|(u, &p)| (Set::singleton(u), p))).unwrap();
        prop_assert!(exact_by_distribution(&f, &y) >= lovasz(&f, &x) - 1e-7);
    }

    #[test]
    fn shift_out_penalizes_z_and_stays_submodular(seed: u64, n in 2usize..=9) {
        let mut r = rng(seed);
        let f = random_function(&mut r, n);
        let z = random_set(&mut r, n);
        let g = shift_out(&f, z);
        prop_assert!(submodularity_violation(&g, TOLERANCE).unwrap().is_none());
        for s in Set::full(n).subsets() {
            for u in Set::full(n).difference(s) {
                let gain = g.eval(s.with(u)) - g.eval(s);
                if z.contains(u) {
                    prop_assert!(gain <= -1.0 + TOLERANCE);
                } else {
                    prop_assert!(close(gain, f.eval(s.with(u)) - f.eval(s), 1e-12));
                }
            }
        }
    }

    #[test]
    fn translation_stays_submodular(seed: u64, n in 2usize..=9) {
        let mut r = rng(seed);
        let f = random_function(&mut r, n);
        let e = random_set(&mut r, n);
        let g = restrict_translate(&f, e);
        prop_assert!(submodularity_violation(&g, TOLERANCE).unwrap().is_none());
        prop_assert_eq!(g.eval(Set::EMPTY), f.eval(e));
    }

    #[test]
    fn canonical_json_round_trips(xs in proptest::collection::vec(-1e6f64..1e6, 0..20)) {
        let text = canonical_json(&xs);
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, xs);
    }
}
