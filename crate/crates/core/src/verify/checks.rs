//! Per-step inequality checkers over solver traces.
//!
//! Every checker recomputes what it needs from uncounted evaluations and never
//! touches the caller's query counters.

use serde::{Deserialize, Serialize};

use crate::config::{AlgoConfig, INEQUALITY_TOLERANCE, TOLERANCE};
use crate::eme::{eval_f_uncounted, EmeVector, JoinedExtension};
use crate::error::{Error, Result};
use crate::knapsack::{Branch, KnapsackInstance, KnapsackRun};
use crate::matroid::{mass, polytope_scan, Matroid};
use crate::matroid_solver::GreedyRun;
use crate::set::Set;
use crate::setfn::{shift_out, Metered, SetFunction, Translated};

use super::brute::{brute_force_within, BruteForceResult, Constraint};

/// Largest real ground set [`check_stationarity`] scans.
pub const STATIONARITY_SCAN_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub iteration: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`.
    pub slack: f64,
    pub pass: bool,
    /// False when a hypothesis of the inequality does not hold on this input.
    pub applicable: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub records: Vec<CheckRecord>,
}

impl CheckReport {
    /// Records `lhs ≥ rhs - tol`.
    pub fn push(&mut self, check: &str, iteration: usize, lhs: f64, rhs: f64, tol: f64) {
        self.records.push(CheckRecord {
            check: check.to_string(),
            iteration,
            lhs,
            rhs,
            slack: lhs - rhs,
            pass: lhs >= rhs - tol,
            applicable: true,
        });
    }

    fn push_flag(&mut self, check: &str, iteration: usize, ok: bool) {
        let v = if ok { 1.0 } else { 0.0 };
        self.push(check, iteration, v, 1.0, 0.0);
    }

    fn push_unmet(&mut self, check: &str, iteration: usize, lhs: f64, rhs: f64) {
        self.records.push(CheckRecord {
            check: check.to_string(),
            iteration,
            lhs,
            rhs,
            slack: lhs - rhs,
            pass: true,
            applicable: false,
        });
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.records.extend(other.records);
    }

    pub fn violations(&self) -> Vec<&CheckRecord> {
        self.records.iter().filter(|r| r.applicable && !r.pass).collect()
    }

    pub fn violation_count(&self) -> usize {
        self.violations().len()
    }

    pub fn of(&self, check: &str) -> impl Iterator<Item = &CheckRecord> {
        let check = check.to_string();
        self.records.iter().filter(move |r| r.check == check)
    }

    pub fn violations_of(&self, check: &str) -> usize {
        self.of(check).filter(|r| r.applicable && !r.pass).count()
    }

    pub fn unmet(&self) -> usize {
        self.records.iter().filter(|r| !r.applicable).count()
    }
}

/// `1 - (1-δ)^k`.
fn growth(delta: f64, k: usize) -> f64 {
    1.0 - (1.0 - delta).powi(k as i32)
}

/// Checks a continuous-greedy trace over the dummy-augmented pair
/// `(mbar, fbar)`. `z` is the stationary basis fed to the greedy, and `opt`
/// the real optimum.
pub fn check_trace<M, F>(
    mbar: &M,
    fbar: &F,
    run: &GreedyRun,
    z: Set,
    opt: &BruteForceResult,
    cfg: &AlgoConfig,
) -> Result<CheckReport>
where
    M: Matroid + ?Sized,
    F: SetFunction + ?Sized,
{
    let quiet = Metered::new(fbar);
    let n = mbar.ground_size();
    let real = Set::full(mbar.n_real());
    let eps = cfg.epsilon;
    let delta = cfg.delta;
    let tol = INEQUALITY_TOLERANCE;
    let mut rep = CheckReport::default();

    for (k, rec) in run.trace.iter().enumerate() {
        let i = k + 1;
        let y_prev = run.point(i - 1);
        let z_i = if i <= cfg.ts_steps { z } else { Set::EMPTY };

        // The recorded F values against a fresh evaluation.
        let f_now = eval_f_uncounted(&quiet, &rec.y, cfg.frac_cap)?;
        let f_prev = eval_f_uncounted(&quiet, &y_prev, cfg.frac_cap)?;
        rep.push("f_value_consistent", i, -(rec.f_value - f_now).abs(), 0.0, TOLERANCE);
        rep.push("f_prev_consistent", i, -(rec.f_prev - f_prev).abs(), 0.0, TOLERANCE);

        // Gain inequality, as stated and in the form its proof derives.
        let opt_i = opt.opt_set.difference(z_i);
        let f_opt_i = eval_f_uncounted(&quiet, &y_prev.join(opt_i), cfg.frac_cap)?;
        let lhs = (rec.f_value - rec.f_prev) / delta;
        rep.push("gain", i, lhs, (1.0 - 3.0 * eps) * (f_opt_i - rec.f_prev), tol);
        rep.push("gain_derived", i, lhs, (1.0 - 3.0 * eps) * f_opt_i - rec.f_prev, tol);

        // Mar growth and the exponential comparison.
        let mar = rec.y.marginal(n);
        rep.push("mar_growth", i, growth(delta, i), mar.linf(), TOLERANCE);
        let z_steps = i.saturating_sub(cfg.ts_steps);
        rep.push("mar_growth_z", i, growth(delta, z_steps), mar.linf_on(z), TOLERANCE);
        let id = i as f64 * delta;
        rep.push(
            "exp_bound",
            i,
            1.0 - (-id).exp() + i as f64 * delta * delta,
            growth(delta, i),
            TOLERANCE,
        );
        rep.push("frac", i, (i * cfg.ell) as f64, rec.frac as f64, 0.0);

        // Split structure and the corollary bound.
        let sp = &rec.split;
        let union = sp.union();
        rep.push_flag("split_disjoint", i, sp.is_disjoint());
        rep.push_flag("split_basis", i, mbar.check(union) && union.len() == mbar.rank());
        if i <= cfg.ts_steps {
            rep.push_flag("z_orthogonal", i, union.is_disjoint(z));
        }
        let shifted = shift_out(&quiet, z_i);
        let g = JoinedExtension::new(&shifted, &y_prev, cfg.frac_cap)?;
        let g_empty = g.eval(Set::EMPTY);
        let gains: f64 = sp.parts.iter().map(|&t| g.eval(t) - g_empty).sum();
        rep.push(
            "split_values_consistent",
            i,
            -(gains - sp.total_gain()).abs(),
            0.0,
            TOLERANCE,
        );
        let o = brute_force_within(&g, real, Constraint::Matroid(&mbar))?;
        rep.push(
            "split_corollary",
            i,
            gains,
            (1.0 - 2.0 * eps) * o.opt_value - (1.0 - eps) * g_empty,
            tol,
        );
    }

    // Mar(y^{1/δ}) ∈ P(M̄), by an exhaustive rank scan.
    let x = run.y.marginal(n).0;
    let bad = polytope_scan(mbar, &x, TOLERANCE)?;
    let (lhs, rhs) = match bad {
        Some(a) => (mbar.rank_uncounted(a) as f64, mass(&x, a)),
        None => (1.0, 1.0),
    };
    rep.push("polytope", cfg.steps, lhs, rhs, TOLERANCE);

    // Value after the last step against the closed-form bound.
    let ts = cfg.ts;
    let z_real = z.intersection(real);
    let f_opt = opt.opt_value;
    let f_and = quiet.eval(z_real.intersection(opt.opt_set));
    let f_or = quiet.eval(z_real.union(opt.opt_set));
    let e = (-ts).exp();
    let bound =
        (ts - 1.0).exp() * ((2.0 - ts - e - 4.0 * eps) * f_opt - (1.0 - e) * f_and - (2.0 - ts - 2.0 * e) * f_or);
    rep.push("final_value", cfg.steps, run.value, bound, tol);
    Ok(rep)
}

/// `f(Z) ≥ ½(f(Z∩T) + f(Z∪T)) - ε·f(OPT)` for every independent `T` of the
/// real matroid. Records `T = OPT`, `T = OPT∩Z`, the tightest `T`, and every
/// failing `T`.
pub fn check_stationarity<M, F>(m: &M, f: &F, z: Set, epsilon: f64, opt: &BruteForceResult) -> Result<CheckReport>
where
    M: Matroid + ?Sized,
    F: SetFunction + ?Sized,
{
    let n = m.ground_size();
    if n > STATIONARITY_SCAN_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: STATIONARITY_SCAN_LIMIT,
        });
    }
    let z = z.intersection(Set::full(n));
    let fz = f.eval(z);
    let pen = epsilon * opt.opt_value;
    let rhs_of = |t: Set| 0.5 * (f.eval(z.intersection(t)) + f.eval(z.union(t))) - pen;
    let tol = INEQUALITY_TOLERANCE;
    let mut rep = CheckReport::default();

    rep.push("stationarity_opt", 0, fz, rhs_of(opt.opt_set), tol);
    rep.push(
        "stationarity_opt_and_z",
        0,
        fz,
        rhs_of(opt.opt_set.intersection(z)),
        tol,
    );
    let mut worst: Option<(f64, Set)> = None;
    for t in Set::full(n).subsets() {
        if !m.check(t) {
            continue;
        }
        let rhs = rhs_of(t);
        if fz < rhs - tol {
            rep.push("stationarity_violation", 0, fz, rhs, tol);
        }
        if worst.is_none_or(|(w, _)| rhs > w) {
            worst = Some((rhs, t));
        }
    }
    let (rhs, _) = worst.expect("the empty set is independent");
    rep.push("stationarity_all", 0, fz, rhs, tol);
    Ok(rep)
}

/// `Σ_u w(u)·Mar_u(y)`, with `Mar_u = 1 - Π_{S ∋ u}(1 - y_S)` computed
/// directly from the coordinates.
pub fn weighted_mass_direct(y: &EmeVector, weights: &[f64]) -> f64 {
    (0..weights.len())
        .map(|u| {
            let mar = if y.sure().contains(u) {
                1.0
            } else {
                1.0 - y
                    .coords()
                    .filter(|(s, _)| s.contains(u))
                    .map(|(_, p)| 1.0 - p)
                    .product::<f64>()
            };
            weights[u] * mar
        })
        .sum()
}

/// Checks one enumeration branch. Iteration numbers are DMCG steps for the
/// DMCG and split checks and exchange indices for the rounding checks.
pub fn check_branch<F: SetFunction + ?Sized>(
    f: &F,
    inst: &KnapsackInstance,
    br: &Branch,
    cfg: &AlgoConfig,
) -> Result<CheckReport> {
    let quiet = Metered::new(f);
    let g = Translated::new(&quiet, br.prefix);
    let w = inst.weights();
    let eps = cfg.epsilon;
    let b_res = br.residual_budget;
    let tol = INEQUALITY_TOLERANCE;
    let mut rep = CheckReport::default();

    let outer = inst.budget() - inst.weight_of(br.prefix);
    rep.push(
        "residual_budget",
        0,
        -(b_res - (1.0 - eps) * outer).abs(),
        0.0,
        TOLERANCE,
    );
    rep.push("item_cap", 0, -(br.item_cap - eps * outer).abs(), 0.0, TOLERANCE);
    let heavy = br.candidates.iter().filter(|&u| w[u] > eps * outer).count();
    rep.push_flag("heavy_filtered", 0, heavy == 0 && br.candidates.is_disjoint(br.prefix));

    let q = brute_force_within(
        &g,
        br.candidates,
        Constraint::Knapsack {
            weights: w,
            budget: b_res,
        },
    )?;
    for (k, rec) in br.dmcg.trace.iter().enumerate() {
        let i = k + 1;
        rep.push("dmcg_mass", i, b_res, weighted_mass_direct(&rec.y, w), 0.0);
        rep.push("dmcg_frac", i, (i * cfg.ell) as f64, rec.frac as f64, 0.0);

        let sp = &rec.split;
        rep.push_flag(
            "knapsack_split_disjoint",
            i,
            sp.is_disjoint() && sp.union().is_subset(br.candidates),
        );
        rep.push("knapsack_split_weight", i, b_res, inst.weight_of(sp.union()), TOLERANCE);
        for j in 0..sp.parts.len() {
            let dens: Vec<f64> = sp.picks.iter().filter(|p| p.part == j).map(|p| p.density).collect();
            for pair in dens.windows(2) {
                rep.push("density_monotone", i, pair[0], pair[1], TOLERANCE);
            }
        }

        let y_prev = br.dmcg.point(i - 1);
        let gj = JoinedExtension::new(&g, &y_prev, cfg.frac_cap)?;
        let g_empty = gj.eval(Set::EMPTY);
        let g_q = gj.eval(q.opt_set);
        let lhs: f64 = sp.parts.iter().map(|&t| gj.eval(t) - g_empty).sum();
        let inner: f64 = sp
            .parts
            .iter()
            .map(|&t| gj.eval(q.opt_set.union(t)) - gj.eval(t))
            .sum::<f64>()
            / sp.parts.len() as f64
            - eps * eps * g_q;
        let rhs = inner.max(0.0);
        let hypothesis = q
            .opt_set
            .iter()
            .all(|u| gj.eval(Set::singleton(u)) - g_empty <= eps * eps * g_q + TOLERANCE);
        if hypothesis {
            rep.push("knapsack_split_lemma", i, lhs, rhs, tol);
        } else {
            rep.push_unmet("knapsack_split_lemma", i, lhs, rhs);
        }
    }

    let rd = &br.rounding;
    for (k, ex) in rd.exchanges.iter().enumerate() {
        let i = k + 1;
        rep.push(
            "rounding_conservation",
            i,
            -(ex.weighted_after - ex.weighted_before).abs(),
            0.0,
            TOLERANCE,
        );
        rep.push("rounding_convexity", i, ex.g_min.max(ex.g_max), ex.g_mid, TOLERANCE);
        rep.push("rounding_monotone", i, ex.g_min.max(ex.g_max), ex.g_before, TOLERANCE);
    }
    rep.push(
        "rounding_frac",
        0,
        (rd.initial_frac + 2) as f64,
        rd.max_frac as f64,
        0.0,
    );
    rep.push("rounding_value", 0, g.eval(rd.set), rd.f_input, TOLERANCE);
    rep.push(
        "rounding_weight",
        0,
        b_res + eps * outer,
        inst.weight_of(rd.set),
        TOLERANCE,
    );
    rep.push("feasible", 0, inst.budget(), inst.weight_of(br.set), 0.0);
    rep.push(
        "budget_exactness",
        0,
        inst.budget(),
        (1.0 + eps) * b_res + inst.weight_of(br.prefix),
        TOLERANCE,
    );
    rep.push(
        "branch_value_consistent",
        0,
        -(quiet.eval(br.set) - br.value).abs(),
        0.0,
        TOLERANCE,
    );
    Ok(rep)
}

/// [`check_branch`] over every branch, plus the argmax rule.
pub fn check_knapsack<F: SetFunction + ?Sized>(
    f: &F,
    inst: &KnapsackInstance,
    run: &KnapsackRun,
    cfg: &AlgoConfig,
) -> Result<CheckReport> {
    let mut rep = CheckReport::default();
    for br in &run.branches {
        rep.extend(check_branch(f, inst, br, cfg)?);
    }
    let best = run.branches.iter().map(|b| b.value).fold(f64::NEG_INFINITY, f64::max);
    rep.push("argmax", 0, run.value, best, 1e-12);
    rep.push("feasible_result", 0, inst.budget(), run.weight, 0.0);
    Ok(rep)
}
