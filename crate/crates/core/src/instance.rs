//! Instance files and seeded generators.
//!
//! ```json
//! {
//!   "n": 4,
//!   "function": {"kind": "cut", "edges": [[0, 1, 1.0], [1, 2, 2.0]]},
//!   "constraint": {"kind": "matroid", "matroid": {"family": "uniform", "k": 2}}
//! }
//! ```
//!
//! Function kinds: `coverage` (`universe_weights`, `covers`), `cut` (`edges`
//! as `[u, v, w]`), `table` (`values`, indexed by bitmask). Constraint kinds:
//! `matroid` with family `uniform` (`k`), `partition` (`parts` of
//! `{members, capacity}`) or `graphic` (`edges` as `[a, b]`, one per element),
//! and `knapsack` (`weights`, `budget`).

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};
use crate::knapsack::KnapsackInstance;
use crate::matroid::{GraphicMatroid, Matroid, Part, PartitionMatroid, UniformMatroid};
use crate::set::Set;
use crate::setfn::{CoverageFunction, CutFunction, SetFunction, TableFunction};

/// Largest `n` the generators produce; brute-force checks scan up to here.
pub const MAX_GEN_N: usize = 20;

/// Largest `n` for generated tables (`2^n` values in the file).
pub const MAX_TABLE_GEN_N: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Coverage {
        universe_weights: Vec<f64>,
        covers: Vec<Vec<usize>>,
    },
    Cut {
        edges: Vec<(usize, usize, f64)>,
    },
    Table {
        values: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct PartSpec {
    pub members: Vec<usize>,
    pub capacity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatroidSpec {
    Uniform { k: usize },
    Partition { parts: Vec<PartSpec> },
    Graphic { edges: Vec<(usize, usize)> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintSpec {
    Matroid { matroid: MatroidSpec },
    Knapsack { weights: Vec<f64>, budget: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub n: usize,
    pub function: FunctionSpec,
    pub constraint: ConstraintSpec,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Instance> {
        let inst: Instance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    /// Pretty JSON with a trailing newline; the generators write this.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    /// SHA-256 of the compact serialization of the parsed instance, so that
    /// whitespace changes do not alter it.
    pub fn digest(&self) -> String {
        let compact = serde_json::to_string(self).expect("instance serializes");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        self.function()?;
        match &self.constraint {
            ConstraintSpec::Matroid { .. } => {
                self.matroid()?;
            }
            ConstraintSpec::Knapsack { .. } => {
                self.knapsack()?;
            }
        }
        Ok(())
    }

    pub fn function(&self) -> Result<Box<dyn SetFunction>> {
        let f: Box<dyn SetFunction> = match &self.function {
            FunctionSpec::Coverage {
                universe_weights,
                covers,
            } => Box::new(CoverageFunction::new(universe_weights.clone(), covers)?),
            FunctionSpec::Cut { edges } => Box::new(CutFunction::new(self.n, edges.clone())?),
            FunctionSpec::Table { values } => Box::new(TableFunction::non_negative(values.clone())?),
        };
        if f.ground_size() != self.n {
            return Err(invalid(format!(
                "function has {} elements, instance declares n = {}",
                f.ground_size(),
                self.n
            )));
        }
        Ok(f)
    }

    pub fn is_matroid(&self) -> bool {
        matches!(self.constraint, ConstraintSpec::Matroid { .. })
    }

    pub fn matroid(&self) -> Result<Box<dyn Matroid>> {
        let ConstraintSpec::Matroid { matroid } = &self.constraint else {
            return Err(invalid("instance constraint is not a matroid"));
        };
        let m: Box<dyn Matroid> = match matroid {
            MatroidSpec::Uniform { k } => Box::new(UniformMatroid::new(self.n, *k)?),
            MatroidSpec::Partition { parts } => {
                let parts = parts
                    .iter()
                    .map(|p| {
                        if p.members.iter().any(|&u| u >= self.n) {
                            return Err(invalid("partition member out of range"));
                        }
                        Ok(Part {
                            members: Set::from_elements(p.members.iter().copied()),
                            capacity: p.capacity,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Box::new(PartitionMatroid::new(self.n, parts)?)
            }
            MatroidSpec::Graphic { edges } => Box::new(GraphicMatroid::new(edges.clone())?),
        };
        if m.ground_size() != self.n {
            return Err(invalid(format!(
                "matroid has {} elements, instance declares n = {}",
                m.ground_size(),
                self.n
            )));
        }
        Ok(m)
    }

    pub fn knapsack(&self) -> Result<KnapsackInstance> {
        let ConstraintSpec::Knapsack { weights, budget } = &self.constraint else {
            return Err(invalid("instance constraint is not a knapsack"));
        };
        if weights.len() != self.n {
            return Err(invalid(format!("{} weights for n = {}", weights.len(), self.n)));
        }
        KnapsackInstance::new(weights.clone(), *budget)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Coverage,
    Cut,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    Uniform,
    Partition,
    Graphic,
    Knapsack,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Coverage, Family::Cut, Family::Table];

    pub fn name(self) -> &'static str {
        match self {
            Family::Coverage => "coverage",
            Family::Cut => "cut",
            Family::Table => "table",
        }
    }
}

impl ConstraintKind {
    pub const MATROIDS: [ConstraintKind; 3] = [
        ConstraintKind::Uniform,
        ConstraintKind::Partition,
        ConstraintKind::Graphic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::Uniform => "uniform",
            ConstraintKind::Partition => "partition",
            ConstraintKind::Graphic => "graphic",
            ConstraintKind::Knapsack => "knapsack",
        }
    }
}

/// A generator kind such as `cut-graphic`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Kind {
    pub family: Family,
    pub constraint: ConstraintKind,
}

impl Kind {
    pub fn all() -> Vec<Kind> {
        let mut out = Vec::new();
        for family in Family::ALL {
            for constraint in ConstraintKind::MATROIDS.into_iter().chain([ConstraintKind::Knapsack]) {
                out.push(Kind { family, constraint });
            }
        }
        out
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.family.name(), self.constraint.name())
    }
}

impl FromStr for Kind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Kind> {
        Kind::all().into_iter().find(|k| k.to_string() == s).ok_or_else(|| {
            invalid(format!(
                "unknown kind {s:?}; expected <coverage|cut|table>-<uniform|partition|graphic|knapsack>"
            ))
        })
    }
}

/// Quarter-integers keep generated numbers short and exactly representable.
fn quarter(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> f64 {
    rng.gen_range(lo..=hi) as f64 / 4.0
}

fn gen_coverage(rng: &mut ChaCha8Rng, n: usize) -> FunctionSpec {
    let m = (n + 2).min(64);
    let universe_weights = (0..m).map(|_| quarter(rng, 2, 20)).collect();
    let covers = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let mut items: Vec<usize> = (0..m).collect::<Vec<_>>().choose_multiple(rng, k).copied().collect();
            items.sort_unstable();
            items
        })
        .collect();
    FunctionSpec::Coverage {
        universe_weights,
        covers,
    }
}

fn gen_cut_edges(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(0.4) {
                edges.push((a, b, quarter(rng, 2, 16)));
            }
        }
    }
    if edges.is_empty() && n >= 2 {
        edges.push((0, 1, 1.0));
    }
    edges
}

/// A tabulated sum of a capped modular part (monotone) and a cut (symmetric).
fn gen_table(rng: &mut ChaCha8Rng, n: usize) -> FunctionSpec {
    let a: Vec<f64> = (0..n).map(|_| quarter(rng, 1, 12)).collect();
    let cap = a.iter().sum::<f64>() * 0.5;
    let cut = CutFunction::new(n, gen_cut_edges(rng, n)).expect("generated edges are valid");
    let values = Set::full(n)
        .subsets()
        .map(|s| {
            let m: f64 = s.iter().map(|u| a[u]).sum();
            m.min(cap) + cut.eval(s)
        })
        .collect();
    FunctionSpec::Table { values }
}

fn gen_matroid(rng: &mut ChaCha8Rng, n: usize, kind: ConstraintKind) -> MatroidSpec {
    let rank = rng.gen_range(2..=3).min(n);
    match kind {
        ConstraintKind::Uniform => MatroidSpec::Uniform { k: rank },
        ConstraintKind::Partition => {
            let mut ids: Vec<usize> = (0..n).collect();
            ids.shuffle(rng);
            let cut = (n / 2).max(1);
            let (left, right) = ids.split_at(cut);
            let c1 = if rank == 3 { 2 } else { 1 };
            let mut parts = vec![PartSpec {
                members: sorted(left),
                capacity: c1,
            }];
            if !right.is_empty() {
                parts.push(PartSpec {
                    members: sorted(right),
                    capacity: rank - c1,
                });
            }
            MatroidSpec::Partition { parts }
        }
        ConstraintKind::Graphic => {
            // `rank + 1` vertices with parallel edges allowed.
            let v = rank + 1;
            let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n);
            for i in 0..n {
                if i + 1 < v {
                    edges.push((i, i + 1));
                } else {
                    let a = rng.gen_range(0..v);
                    let mut b = rng.gen_range(0..v - 1);
                    if b >= a {
                        b += 1;
                    }
                    edges.push((a.min(b), a.max(b)));
                }
            }
            edges.shuffle(rng);
            MatroidSpec::Graphic { edges }
        }
        ConstraintKind::Knapsack => unreachable!("not a matroid"),
    }
}

fn sorted(xs: &[usize]) -> Vec<usize> {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v
}

/// Seeded instance of the given kind. Identical inputs give identical instances.
pub fn generate(kind: Kind, n: usize, seed: u64) -> Result<Instance> {
    let cap = if kind.family == Family::Table {
        MAX_TABLE_GEN_N
    } else {
        MAX_GEN_N
    };
    if n == 0 || n > cap {
        return Err(invalid(format!("n = {n} is outside 1..={cap} for {kind}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let function = match kind.family {
        Family::Coverage => gen_coverage(&mut rng, n),
        Family::Cut => FunctionSpec::Cut {
            edges: gen_cut_edges(&mut rng, n),
        },
        Family::Table => gen_table(&mut rng, n),
    };
    let constraint = match kind.constraint {
        ConstraintKind::Knapsack => {
            let weights: Vec<f64> = (0..n).map(|_| quarter(&mut rng, 2, 16)).collect();
            let total: f64 = weights.iter().sum();
            let share = rng.gen_range(35..=60) as f64 / 100.0;
            let budget = (total * share * 4.0).round() / 4.0;
            ConstraintSpec::Knapsack { weights, budget }
        }
        m => ConstraintSpec::Matroid {
            matroid: gen_matroid(&mut rng, n, m),
        },
    };
    let inst = Instance {
        n,
        function,
        constraint,
    };
    inst.validate()?;
    Ok(inst)
}
