//! `submax`: generate instances, solve them, verify reports, run suites.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O, parse or other runtime error |
//! | 2 | usage error (bad flag, unknown kind, out-of-range argument) |
//! | 3 | evaluation budget exceeded (`--frac-cap`) |
//! | 4 | an algorithm precondition failed |
//! | 5 | verification found violations |
//! | 6 | report and instance digests differ |

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use submax_core::config::{AlgoConfig, DEFAULT_ENUM_CAP, DEFAULT_EPSILON, DEFAULT_TS, TOLERANCE};
use submax_core::eme::DEFAULT_FRAC_CAP;
use submax_core::instance::{generate, Instance, Kind};
use submax_core::report::{canonical_json, solve, verify, RunReport};
use submax_core::suite::{run_suite, with_threads};
use submax_core::verify::validate::{submodularity_violation, SUBMODULARITY_SCAN_LIMIT};
use submax_core::Error;

const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_CONTRACT: u8 = 4;
const EXIT_VIOLATIONS: u8 = 5;
const EXIT_DIGEST: u8 = 6;

#[derive(Parser)]
#[command(
    name = "submax",
    version,
    about = "Deterministic submodular maximization with step-by-step verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded instance.
    Gen {
        /// `<coverage|cut|table>-<uniform|partition|graphic|knapsack>`
        #[arg(long)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance and write its run report.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_TS)]
        ts: f64,
        #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
        enum_cap: usize,
        #[arg(long, default_value_t = DEFAULT_FRAC_CAP)]
        frac_cap: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a run report against its instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Generate, solve and verify `count` instances of every kind.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
}

enum Failure {
    Core(Error),
    Violations(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => EXIT_BUDGET,
        Error::Contract(_) | Error::UndefinedDerivative => EXIT_CONTRACT,
        Error::InvalidInput(_) | Error::TooLarge { .. } => EXIT_USAGE,
        Error::DigestMismatch { .. } => EXIT_DIGEST,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_ERROR,
    }
}

fn threads() -> Result<Option<usize>, Error> {
    match std::env::var("SUBMAX_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .map(Some)
            .ok_or_else(|| Error::InvalidInput(format!("SUBMAX_THREADS must be a positive integer, got {v:?}"))),
        _ => Ok(None),
    }
}

fn read_instance(path: &Path) -> Result<Instance, Error> {
    let inst = Instance::from_json(&fs::read_to_string(path)?)?;
    inst.validate()?;
    Ok(inst)
}

fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Gen { kind, n, seed, out } => {
            let inst = generate(kind, n, seed)?;
            if n <= SUBMODULARITY_SCAN_LIMIT {
                let f = inst.function()?;
                if let Some(w) = submodularity_violation(&f, TOLERANCE)? {
                    return Err(Error::Contract(format!("generated objective is not submodular at {w:?}")).into());
                }
            }
            emit(out.as_deref(), &inst.to_json())?;
        }
        Command::Solve {
            instance,
            epsilon,
            ts,
            enum_cap,
            frac_cap,
            out,
        } => {
            let cfg = AlgoConfig::with_caps(epsilon, ts, frac_cap, enum_cap)?;
            let inst = read_instance(&instance)?;
            let report = with_threads(threads()?, || solve(&inst, &cfg))??;
            emit(out.as_deref(), &report.to_canonical())?;
        }
        Command::Verify { instance, report } => {
            let inst = read_instance(&instance)?;
            let rep = RunReport::from_json(&fs::read_to_string(report)?)?;
            let summary = verify(&inst, &rep)?;
            print!("{}", canonical_json(&summary));
            if summary.violations > 0 {
                return Err(Failure::Violations(summary.violations));
            }
        }
        Command::Suite {
            seed,
            count,
            out_dir,
            epsilon,
        } => {
            let cfg = AlgoConfig::new(epsilon, DEFAULT_TS)?;
            let rows = with_threads(threads()?, || run_suite(seed, count, &cfg, Some(&out_dir)))??;
            let bad: usize = rows.iter().map(|r| r.violations).sum();
            eprintln!("{} runs written to {}", rows.len(), out_dir.display());
            if bad > 0 {
                return Err(Failure::Violations(bad));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(cli.command);
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violations(k)) => {
            eprintln!("error: {k} check violation(s)");
            ExitCode::from(EXIT_VIOLATIONS)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
