//! Run reports, their canonical serialization, and verification of a report
//! against its instance.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{AlgoConfig, TOLERANCE};
use crate::eme::eval_f_uncounted;
use crate::error::{invalid, Error, Result};
use crate::instance::Instance;
use crate::knapsack::{solve_knapsack, KnapsackRun};
use crate::matroid::{AugmentedMatroid, Matroid};
use crate::matroid_solver::local_search::iteration_bound;
use crate::matroid_solver::{query_constant, solve_matroid, MatroidRun};
use crate::set::Set;
use crate::setfn::{augment_with_dummies, SetFunction};
use crate::verify::brute::{brute_force_opt, BruteForceResult, Constraint, BRUTE_FORCE_LIMIT};
use crate::verify::checks::{check_knapsack, check_stationarity, check_trace, CheckRecord, CheckReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance_digest: String,
    /// `matroid` or `knapsack`.
    pub pipeline: String,
    pub config: AlgoConfig,
    pub set: Set,
    pub value: f64,
    pub opt: Option<BruteForceResult>,
    pub ratio: Option<f64>,
    pub value_queries: u64,
    pub independence_queries: u64,
    pub matroid: Option<MatroidRun>,
    pub knapsack: Option<KnapsackRun>,
}

impl RunReport {
    pub fn to_canonical(&self) -> String {
        canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<RunReport> {
        Ok(serde_json::from_str(text)?)
    }
}

/// JSON with object keys sorted, no insignificant whitespace, integers as
/// integers and every other number in `{:.16e}` (17 significant digits).
/// A trailing newline is appended.
pub fn canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report serializes");
    let mut out = String::new();
    write_value(&v, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                let x = n.as_f64().expect("finite number");
                write!(out, "{x:.16e}").unwrap();
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("key serializes"));
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}

fn ratio(value: f64, opt: &BruteForceResult) -> f64 {
    if opt.opt_value > 0.0 {
        value / opt.opt_value
    } else {
        1.0
    }
}

fn opt_of(inst: &Instance) -> Result<Option<BruteForceResult>> {
    if inst.n > BRUTE_FORCE_LIMIT {
        return Ok(None);
    }
    let f = inst.function()?;
    let opt = if inst.is_matroid() {
        let m = inst.matroid()?;
        brute_force_opt(&f, Constraint::Matroid(&m))?
    } else {
        let k = inst.knapsack()?;
        brute_force_opt(
            &f,
            Constraint::Knapsack {
                weights: k.weights(),
                budget: k.budget(),
            },
        )?
    };
    Ok(Some(opt))
}

/// Solves `inst` with the pipeline its constraint selects. The brute-force
/// optimum is attached when `n` is small enough.
pub fn solve(inst: &Instance, cfg: &AlgoConfig) -> Result<RunReport> {
    let f = inst.function()?;
    let opt = opt_of(inst)?;
    let mut report = RunReport {
        instance_digest: inst.digest(),
        pipeline: String::new(),
        config: cfg.clone(),
        set: Set::EMPTY,
        value: 0.0,
        opt: None,
        ratio: None,
        value_queries: 0,
        independence_queries: 0,
        matroid: None,
        knapsack: None,
    };
    if inst.is_matroid() {
        let m = inst.matroid()?;
        let run = solve_matroid(&m, &f, cfg)?;
        report.pipeline = "matroid".into();
        report.set = run.set;
        report.value = run.value;
        report.value_queries = run.value_queries;
        report.independence_queries = run.independence_queries;
        report.matroid = Some(run);
    } else {
        let k = inst.knapsack()?;
        let run = solve_knapsack(&f, &k, cfg)?;
        report.pipeline = "knapsack".into();
        report.set = run.set;
        report.value = run.value;
        report.value_queries = run.value_queries;
        report.knapsack = Some(run);
    }
    report.ratio = opt.as_ref().map(|o| ratio(report.value, o));
    report.opt = opt;
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckTally {
    pub count: usize,
    pub violations: usize,
    pub unmet: usize,
    /// Smallest `lhs - rhs` among applicable records.
    pub min_slack: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub instance_digest: String,
    pub pipeline: String,
    pub checks: usize,
    pub violations: usize,
    pub unmet: usize,
    pub tallies: BTreeMap<String, CheckTally>,
    pub failures: Vec<CheckRecord>,
    pub opt: BruteForceResult,
    pub ratio: f64,
}

impl VerifySummary {
    fn from_report(
        digest: String,
        pipeline: &str,
        rep: CheckReport,
        opt: BruteForceResult,
        value: f64,
    ) -> VerifySummary {
        let mut tallies: BTreeMap<String, CheckTally> = BTreeMap::new();
        for r in &rep.records {
            let t = tallies.entry(r.check.clone()).or_default();
            t.count += 1;
            if !r.applicable {
                t.unmet += 1;
                continue;
            }
            if !r.pass {
                t.violations += 1;
            }
            t.min_slack = Some(t.min_slack.map_or(r.slack, |s: f64| s.min(r.slack)));
        }
        VerifySummary {
            instance_digest: digest,
            pipeline: pipeline.to_string(),
            checks: rep.records.len(),
            violations: rep.violation_count(),
            unmet: rep.unmet(),
            tallies,
            failures: rep.violations().into_iter().cloned().collect(),
            ratio: ratio(value, &opt),
            opt,
        }
    }
}

/// Re-checks every recorded step of `report` against `inst`. Nothing in the
/// report is trusted except as the object under test: the optimum is
/// recomputed and every value is re-evaluated.
pub fn verify(inst: &Instance, report: &RunReport) -> Result<VerifySummary> {
    let digest = inst.digest();
    if digest != report.instance_digest {
        return Err(Error::DigestMismatch {
            report: report.instance_digest.clone(),
            instance: digest,
        });
    }
    let opt = opt_of(inst)?.ok_or(Error::TooLarge {
        n: inst.n,
        limit: BRUTE_FORCE_LIMIT,
    })?;
    let cfg = &report.config;
    let f = inst.function()?;
    let tol = TOLERANCE;

    let rep = if let Some(run) = &report.matroid {
        let m = inst.matroid()?;
        let mbar = AugmentedMatroid::with_default_dummies(&m)?;
        let fbar = augment_with_dummies(&f, mbar.n_dummy())?;
        let ls = &run.local_search;
        let mut rep = check_stationarity(&m, &f, ls.z, cfg.epsilon, &opt)?;
        rep.extend(check_trace(&mbar, &fbar, &run.greedy, ls.z, &opt, cfg)?);

        let basis = mbar.check(ls.z) && ls.z.len() == mbar.rank();
        rep.push("local_search_basis", 0, f64::from(u8::from(basis)), 1.0, 0.0);
        let bound = iteration_bound(mbar.rank(), cfg.epsilon, ls.s0_value, opt.opt_value);
        rep.push("local_search_iterations", 0, bound, ls.iterations() as f64, 0.0);
        rep.push(
            "local_search_value",
            0,
            -(f.eval(ls.z.intersection(Set::full(inst.n))) - ls.value).abs(),
            0.0,
            tol,
        );

        let f_y = eval_f_uncounted(&fbar, &run.greedy.y, cfg.frac_cap)?;
        rep.push("pipage_contract", 0, f.eval(run.pipage.set), f_y, tol);
        rep.push(
            "pipage_independent",
            0,
            f64::from(u8::from(m.check(run.pipage.set))),
            1.0,
            0.0,
        );
        rep.push("final_independent", 0, f64::from(u8::from(m.check(run.set))), 1.0, 0.0);
        rep.push(
            "final_value_consistent",
            0,
            -(f.eval(run.set) - run.value).abs(),
            0.0,
            tol,
        );
        rep.push("final_choice", 0, run.value, run.pipage.value.max(ls.value), tol);

        let c = query_constant(cfg);
        let n_total = mbar.ground_size() as f64;
        rep.push(
            "query_bound",
            0,
            c * n_total * mbar.rank() as f64,
            run.greedy.value_queries as f64,
            0.0,
        );
        rep
    } else if let Some(run) = &report.knapsack {
        let k = inst.knapsack()?;
        check_knapsack(&f, &k, run, cfg)?
    } else {
        return Err(invalid("report carries neither a matroid nor a knapsack run"));
    };

    let mut rep = rep;
    rep.push(
        "report_value_consistent",
        0,
        -(f.eval(report.set) - report.value).abs(),
        0.0,
        tol,
    );
    Ok(VerifySummary::from_report(
        digest,
        &report.pipeline,
        rep,
        opt,
        f.eval(report.set),
    ))
}
