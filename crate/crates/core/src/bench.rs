//! Method × problem timing grids and Dolan–Moré performance profiles.
//!
//! For problem `p` and method `m` with time `t(p, m)`, the performance ratio
//! is `r(p, m) = t(p, m) / min over m' of t(p, m')`, infinite when `m` did not
//! converge on `p`. The profile `ρₘ(τ)` is the fraction of problems with
//! `r(p, m) ≤ τ`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{generate, GenKind, GenSpec};
use crate::problem::{PwlsProblem, SolveOptions, Status};
use crate::solvers::{solve, Method};

/// Times below this are treated as this, so ratios stay finite.
pub const TIME_FLOOR_S: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct BenchProblem {
    pub id: String,
    pub problem: PwlsProblem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub problem_id: String,
    pub method: Method,
    pub status: Status,
    pub iterations: usize,
    /// Median thread CPU time over the repeats, in seconds.
    pub time_s: f64,
    pub final_residual: f64,
}

impl BenchRecord {
    pub fn solved(&self) -> bool {
        self.status.is_converged()
    }
}

/// A family of generated problems, `count` of them with consecutive seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub kind: GenKind,
    pub n: usize,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub density: Option<f64>,
    #[serde(default)]
    pub diag_offset: Option<f64>,
    #[serde(default)]
    pub offdiag_scale: Option<f64>,
}

impl GridSpec {
    pub fn gen_spec(&self, k: usize) -> GenSpec {
        let mut spec = GenSpec::new(self.kind, self.n, self.seed.wrapping_add(k as u64));
        if let Some(d) = self.density {
            spec.density = d;
        }
        if let Some(d) = self.diag_offset {
            spec.diag_offset = d;
        }
        if let Some(s) = self.offdiag_scale {
            spec.offdiag_scale = s;
        }
        spec
    }

    pub fn problems(&self) -> Result<Vec<BenchProblem>> {
        (0..self.count)
            .into_par_iter()
            .map(|k| {
                let spec = self.gen_spec(k);
                let id = format!("{:?}-n{}-s{}", spec.kind, spec.n, spec.seed).to_lowercase();
                Ok(BenchProblem {
                    id,
                    problem: generate(&spec)?,
                })
            })
            .collect()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

fn time_one(p: &BenchProblem, method: Method, opts: &SolveOptions, repeats: usize) -> Result<BenchRecord> {
    let mut times = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats {
        let r = solve(&p.problem, method, None, opts)?;
        times.push(r.cpu_time_s);
        last = Some(r);
    }
    let r = last.expect("at least one repeat");
    Ok(BenchRecord {
        problem_id: p.id.clone(),
        method,
        status: r.status,
        iterations: r.iterations,
        time_s: median(times),
        final_residual: r.final_residual,
    })
}

/// Solves every problem with every method from `x0 = 0`, `repeats` times
/// each, on `jobs` worker threads (0 lets rayon choose).
///
/// Each solve runs start to finish on one worker and is timed with that
/// thread's CPU clock, so concurrent work is not charged to it. Records come
/// back ordered by problem, then by the order of `methods`.
pub fn run_grid(
    problems: &[BenchProblem],
    methods: &[Method],
    opts: &SolveOptions,
    repeats: usize,
    jobs: usize,
) -> Result<Vec<BenchRecord>> {
    if problems.is_empty() || methods.is_empty() || repeats == 0 {
        return Err(Error::EmptyInput);
    }
    let tasks: Vec<(usize, Method)> = (0..problems.len())
        .flat_map(|i| methods.iter().map(move |&m| (i, m)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        tasks
            .par_iter()
            .with_max_len(1)
            .map(|&(i, m)| time_one(&problems[i], m, opts, repeats))
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub method: Method,
    /// `(log₂ τ, ρ(τ))`, increasing in τ, starting at τ = 1.
    pub points: Vec<(f64, f64)>,
}

impl ProfileCurve {
    /// `ρ(τ)`, the fraction of problems solved within a factor `tau` of the
    /// best method.
    pub fn rho_at(&self, tau: f64) -> f64 {
        let x = tau.log2();
        self.points
            .iter()
            .take_while(|(l, _)| *l <= x)
            .last()
            .map_or(0.0, |&(_, r)| r)
    }

    /// Fraction of problems the method solved at all.
    pub fn solved_fraction(&self) -> f64 {
        self.points.last().map_or(0.0, |&(_, r)| r)
    }
}

/// Builds one curve per method present in `records`, ordered by method.
///
/// Each problem counts once; if a (problem, method) pair appears more than
/// once the first record is used. Ties at the best time credit every tied
/// method. Each curve has a point at every distinct finite ratio seen in the
/// data, plus τ = 1.
pub fn performance_profile(records: &[BenchRecord]) -> Result<Vec<ProfileCurve>> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let methods: BTreeSet<Method> = records.iter().map(|r| r.method).collect();
    let mut by_problem: BTreeMap<&str, BTreeMap<Method, &BenchRecord>> = BTreeMap::new();
    for r in records {
        by_problem
            .entry(&r.problem_id)
            .or_default()
            .entry(r.method)
            .or_insert(r);
    }
    let n_problems = by_problem.len() as f64;

    let mut ratios: BTreeMap<Method, Vec<f64>> = methods.iter().map(|&m| (m, Vec::new())).collect();
    for runs in by_problem.values() {
        let best = runs
            .values()
            .filter(|r| r.solved())
            .map(|r| r.time_s.max(TIME_FLOOR_S))
            .fold(f64::INFINITY, f64::min);
        for &m in &methods {
            let r = match runs.get(&m) {
                Some(r) if r.solved() => r.time_s.max(TIME_FLOOR_S) / best,
                _ => f64::INFINITY,
            };
            ratios.get_mut(&m).expect("every method has an entry").push(r);
        }
    }

    let mut taus: Vec<f64> = ratios.values().flatten().copied().filter(|r| r.is_finite()).collect();
    taus.push(1.0);
    taus.sort_by(f64::total_cmp);
    taus.dedup();

    Ok(ratios
        .into_iter()
        .map(|(method, mut rs)| {
            rs.sort_by(f64::total_cmp);
            let mut k = 0;
            let points = taus
                .iter()
                .map(|&tau| {
                    while k < rs.len() && rs[k] <= tau {
                        k += 1;
                    }
                    (tau.log2(), k as f64 / n_problems)
                })
                .collect();
            ProfileCurve { method, points }
        })
        .collect())
}

#[derive(Serialize)]
struct RecordRow<'a> {
    problem: &'a str,
    method: &'static str,
    status: &'static str,
    iterations: usize,
    time_s: f64,
    final_residual: f64,
}

#[derive(Serialize)]
struct ProfileRow {
    method: &'static str,
    log2_tau: f64,
    rho: f64,
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::InvalidArgument(format!("{}: {other:?}", path.display())),
    }
}

pub fn write_records_csv(path: &Path, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for r in records {
        w.serialize(RecordRow {
            problem: &r.problem_id,
            method: r.method.name(),
            status: r.status.label(),
            iterations: r.iterations,
            time_s: r.time_s,
            final_residual: r.final_residual,
        })
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Columns `method, log2_tau, rho`.
pub fn write_profile_csv(path: &Path, curves: &[ProfileCurve]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for c in curves {
        for &(log2_tau, rho) in &c.points {
            w.serialize(ProfileRow {
                method: c.method.name(),
                log2_tau,
                rho,
            })
            .map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
