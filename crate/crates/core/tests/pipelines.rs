mod common;

use common::{random_eme, random_function, random_set, rng};
use submax_core::config::{AlgoConfig, TOLERANCE};
use submax_core::eme::eval_f_uncounted;
use submax_core::instance::{generate, ConstraintKind, Family, Kind};
use submax_core::knapsack::solve_knapsack;
use submax_core::matroid::make_uniform;
use submax_core::matroid_solver::solve_matroid;
use submax_core::report::{solve, verify, RunReport};
use submax_core::setfn::{augment_with_dummies, make_cut};
use submax_core::verify::validate::submodularity_violation;
use submax_core::verify::{brute_force_opt, check_trace, Constraint};
use submax_core::{AugmentedMatroid, Matroid, Set, SetFunction};

fn kind(family: Family, constraint: ConstraintKind) -> Kind {
    Kind { family, constraint }
}

#[test]
fn joining_a_set_keeps_a_share_of_its_value() {
    for case in 0..100 {
        let mut r = rng(500 + case);
        let n = 7;
        let f = random_function(&mut r, n);
        let y = random_eme(&mut r, n, 6);
        let a = random_set(&mut r, n);
        let joined = eval_f_uncounted(&f, &y.join(a), 24).unwrap();
        let bound = (1.0 - y.marginal(n).linf()) * f.eval(a);
        assert!(joined >= bound - TOLERANCE, "case {case}: {joined} < {bound}");
    }
}

#[test]
fn cut_with_dummies_is_submodular() {
    let f = make_cut(
        5,
        vec![
            (0, 1, 1.0),
            (1, 2, 2.0),
            (2, 3, 0.5),
            (3, 4, 1.5),
            (4, 0, 1.0),
            (0, 2, 0.25),
        ],
    )
    .unwrap();
    let fbar = augment_with_dummies(&f, 5).unwrap();
    assert_eq!(fbar.ground_size(), 10);
    assert!(submodularity_violation(&fbar, TOLERANCE).unwrap().is_none());
}

#[test]
fn seeded_cut_trace_has_no_violations() {
    let inst = generate(kind(Family::Cut, ConstraintKind::Uniform), 8, 4).unwrap();
    let f = inst.function().unwrap();
    let m = make_uniform(8, 2).unwrap();
    let cfg = AlgoConfig::default();
    let run = solve_matroid(&m, &f, &cfg).unwrap();
    let opt = brute_force_opt(&f, Constraint::Matroid(&m)).unwrap();
    let mbar = AugmentedMatroid::with_default_dummies(&m).unwrap();
    let fbar = augment_with_dummies(&f, mbar.n_dummy()).unwrap();
    let rep = check_trace(&mbar, &fbar, &run.greedy, run.local_search.z, &opt, &cfg).unwrap();
    assert_eq!(rep.violation_count(), 0, "{:?}", rep.violations());
    for check in ["frac", "mar_growth", "mar_growth_z"] {
        assert_eq!(rep.of(check).count(), cfg.steps);
    }
}

#[test]
fn pipage_contract_on_seeded_runs() {
    let cfg = AlgoConfig::default();
    for seed in 0..100u64 {
        let constraint = ConstraintKind::MATROIDS[seed as usize % 3];
        let inst = generate(
            kind(Family::ALL[seed as usize / 3 % 3], constraint),
            5 + seed as usize % 4,
            700 + seed,
        )
        .unwrap();
        let f = inst.function().unwrap();
        let m = inst.matroid().unwrap();
        let run = solve_matroid(&m, &f, &cfg).unwrap();
        let fbar = augment_with_dummies(&f, run.n_dummy).unwrap();
        let f_y = eval_f_uncounted(&fbar, &run.greedy.y, cfg.frac_cap).unwrap();
        assert!(f.eval(run.pipage.set) >= f_y - TOLERANCE, "seed {seed}");
        assert!(m.check(run.pipage.set) && m.check(run.set), "seed {seed}");
        assert!(run.value >= run.pipage.value.max(run.local_search.value) - 1e-12);
    }
}

#[test]
fn rounding_bookkeeping_on_seeded_runs() {
    for seed in 0..100u64 {
        let inst = generate(
            kind(Family::ALL[seed as usize % 3], ConstraintKind::Knapsack),
            5 + seed as usize % 5,
            900 + seed,
        )
        .unwrap();
        let cfg = AlgoConfig::with_caps(0.5, 0.372, 24, (seed % 3) as usize).unwrap();
        let f = inst.function().unwrap();
        let k = inst.knapsack().unwrap();
        let run = solve_knapsack(&f, &k, &cfg).unwrap();
        for br in &run.branches {
            for ex in &br.rounding.exchanges {
                assert!(
                    (ex.weighted_after - ex.weighted_before).abs() <= TOLERANCE,
                    "seed {seed}"
                );
            }
            assert!(
                k.weight_of(br.rounding.set) <= br.residual_budget + br.item_cap + TOLERANCE,
                "seed {seed}"
            );
            assert!(k.weight_of(br.set) <= k.budget(), "seed {seed}");
        }
        assert!(k.is_feasible(run.set));
    }
}

#[test]
fn coverage_knapsack_with_one_prefix_element() {
    let inst = generate(kind(Family::Coverage, ConstraintKind::Knapsack), 10, 31).unwrap();
    let cfg = AlgoConfig::with_caps(0.5, 0.372, 24, 1).unwrap();
    let report = solve(&inst, &cfg).unwrap();
    let k = inst.knapsack().unwrap();
    assert!(k.is_feasible(report.set));
    assert_eq!(report.knapsack.as_ref().unwrap().branches.len(), enumerated(&k, 1));
    let ratio = report.ratio.unwrap();
    assert!(ratio > 0.0 && ratio <= 1.0 + 1e-12);
    assert_eq!(verify(&inst, &report).unwrap().violations, 0);
}

fn enumerated(k: &submax_core::KnapsackInstance, cap: usize) -> usize {
    Set::full(k.len())
        .subsets()
        .filter(|s| s.len() <= cap && k.is_feasible(*s))
        .count()
}

#[test]
fn reports_survive_a_json_round_trip() {
    for (i, kind) in Kind::all().into_iter().enumerate() {
        let inst = generate(kind, 7, 60 + i as u64).unwrap();
        let report = solve(&inst, &AlgoConfig::default()).unwrap();
        let text = report.to_canonical();
        let back = RunReport::from_json(&text).unwrap();
        assert_eq!(back, report, "{kind}");
        assert_eq!(back.to_canonical(), text);
    }
}

#[test]
fn augmented_rank_matches_real_rank() {
    for seed in 0..20u64 {
        let inst = generate(kind(Family::Cut, ConstraintKind::MATROIDS[seed as usize % 3]), 8, seed).unwrap();
        let m = inst.matroid().unwrap();
        let mbar = AugmentedMatroid::with_default_dummies(&m).unwrap();
        assert_eq!(mbar.rank(), m.rank());
        assert_eq!(mbar.ground_size(), 8 + m.rank());
    }
}
