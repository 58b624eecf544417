//! Seeded batch runs: generate, solve, verify, and aggregate.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::AlgoConfig;
use crate::error::Result;
use crate::instance::{generate, Kind};
use crate::report::{canonical_json, solve, verify};

/// Smallest and largest `n` drawn by the suite.
pub const SUITE_N: (usize, usize) = (6, 10);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub family: String,
    pub n: usize,
    pub epsilon: f64,
    pub ratio: f64,
    pub queries_value: u64,
    pub queries_indep: u64,
    pub violations: usize,
}

/// Instance seed for the `index`-th instance of `kind`.
pub fn instance_seed(seed: u64, kind: Kind, index: usize) -> u64 {
    let k = Kind::all().iter().position(|&x| x == kind).expect("known kind") as u64;
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (k << 32) ^ index as u64
}

/// `count` instances per kind. When `out_dir` is given, each run writes
/// `<kind>-<index>.{instance,report,checks}.json` and the aggregate goes to
/// `suite.csv`.
pub fn run_suite(seed: u64, count: usize, cfg: &AlgoConfig, out_dir: Option<&Path>) -> Result<Vec<SuiteRow>> {
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
    }
    let jobs: Vec<(Kind, usize)> = Kind::all()
        .into_iter()
        .flat_map(|k| (0..count).map(move |i| (k, i)))
        .collect();
    let span = SUITE_N.1 - SUITE_N.0 + 1;
    let rows: Vec<SuiteRow> = jobs
        .par_iter()
        .map(|&(kind, i)| -> Result<SuiteRow> {
            let n = SUITE_N.0 + i % span;
            let inst = generate(kind, n, instance_seed(seed, kind, i))?;
            let report = solve(&inst, cfg)?;
            let summary = verify(&inst, &report)?;
            if let Some(dir) = out_dir {
                let stem = format!("{kind}-{i:03}");
                fs::write(dir.join(format!("{stem}.instance.json")), inst.to_json())?;
                fs::write(dir.join(format!("{stem}.report.json")), report.to_canonical())?;
                fs::write(dir.join(format!("{stem}.checks.json")), canonical_json(&summary))?;
            }
            Ok(SuiteRow {
                family: kind.to_string(),
                n,
                epsilon: cfg.epsilon,
                ratio: summary.ratio,
                queries_value: report.value_queries,
                queries_indep: report.independence_queries,
                violations: summary.violations,
            })
        })
        .collect::<Result<_>>()?;
    if let Some(dir) = out_dir {
        fs::write(dir.join("suite.csv"), to_csv(&rows)?)?;
    }
    Ok(rows)
}

/// CSV with the floats in shortest round-trip form.
pub fn to_csv(rows: &[SuiteRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "family",
        "n",
        "epsilon",
        "ratio",
        "queries_value",
        "queries_indep",
        "violations",
    ])?;
    for r in rows {
        w.write_record([
            r.family.clone(),
            r.n.to_string(),
            format!("{}", r.epsilon),
            format!("{}", r.ratio),
            r.queries_value.to_string(),
            r.queries_indep.to_string(),
            r.violations.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Runs `op` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, op: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(op()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| crate::error::invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(op))
        }
    }
}
