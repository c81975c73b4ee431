//! Seeded random instances and the built-in counterexamples.
//!
//! All randomness comes from ChaCha8 seeded with [`GenSpec::seed`] through
//! `seed_from_u64`. Uniform reals are built directly from the 53 high bits of
//! `next_u64`, so an instance depends only on the spec, not on the platform or
//! on the version of any distribution code.

use std::collections::HashSet;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::problem::PwlsProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenKind {
    /// Dense, strongly diagonally dominant.
    Dense,
    /// Sparse (CSR), strongly diagonally dominant.
    Sparse,
    /// Dense symmetric positive definite.
    Spd,
    /// Diagonal, avoiding `tᵢᵢ` near 0 and −1.
    Diagonal,
}

impl std::str::FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(GenKind::Dense),
            "sparse" => Ok(GenKind::Sparse),
            "spd" => Ok(GenKind::Spd),
            "diagonal" => Ok(GenKind::Diagonal),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    /// Fraction of off-diagonal positions that are nonzero (sparse only).
    #[serde(default = "default_density")]
    pub density: f64,
    pub seed: u64,
    /// Added to the absolute off-diagonal row sum to form the diagonal.
    #[serde(default = "default_diag_offset")]
    pub diag_offset: f64,
    /// Off-diagonal entries are drawn from `[−s, s]`.
    #[serde(default = "default_offdiag_scale")]
    pub offdiag_scale: f64,
}

fn default_density() -> f64 {
    0.003
}

fn default_diag_offset() -> f64 {
    1.001
}

fn default_offdiag_scale() -> f64 {
    1.0
}

impl GenSpec {
    pub fn new(kind: GenKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            density: default_density(),
            seed,
            diag_offset: default_diag_offset(),
            offdiag_scale: default_offdiag_scale(),
        }
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "density must lie in (0, 1], got {}",
                self.density
            )));
        }
        if !self.diag_offset.is_finite() || !(self.offdiag_scale >= 0.0) || !self.offdiag_scale.is_finite() {
            return Err(Error::InvalidArgument(
                "diag_offset and offdiag_scale must be finite".into(),
            ));
        }
        Ok(())
    }
}

struct Uniform(ChaCha8Rng);

impl Uniform {
    fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform on `[0, 1)`.
    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform on `0..m` by the multiply-shift map.
    fn index(&mut self, m: usize) -> usize {
        ((u128::from(self.0.next_u64()) * m as u128) >> 64) as usize
    }

    fn vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.range(-1.0, 1.0)).collect()
    }
}

fn expect_kind(spec: &GenSpec, kind: GenKind) -> Result<()> {
    spec.validate()?;
    if spec.kind == kind {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "spec kind {:?} used with the {:?} generator",
            spec.kind, kind
        )))
    }
}

/// Off-diagonals uniform on `[−s, s]`, diagonal `diag_offset + Σ|tᵢⱼ|`,
/// `b` uniform on `[−1, 1]ⁿ`.
pub fn gen_dense_sdd(spec: &GenSpec) -> Result<PwlsProblem> {
    expect_kind(spec, GenKind::Dense)?;
    let n = spec.n;
    let s = spec.offdiag_scale;
    let mut rng = Uniform::new(spec.seed);
    let mut t = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let mut sum = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let v = rng.range(-s, s);
            t.set(i, j, v);
            sum += v.abs();
        }
        t.set(i, i, spec.diag_offset + sum);
    }
    PwlsProblem::new(t, rng.vector(n))
}

/// `round(density·n(n−1))` distinct off-diagonal positions, sampled without
/// replacement, with values uniform on `[−s, s]`. The diagonal is always
/// stored and set as in [`gen_dense_sdd`].
pub fn gen_sparse_sdd(spec: &GenSpec) -> Result<PwlsProblem> {
    expect_kind(spec, GenKind::Sparse)?;
    let n = spec.n;
    let s = spec.offdiag_scale;
    let slots = n * (n - 1);
    let target = ((spec.density * slots as f64).round() as usize).min(slots);
    let mut rng = Uniform::new(spec.seed);
    let mut taken = HashSet::with_capacity(target);
    let mut triplets = Vec::with_capacity(target + n);
    let mut row_sums = vec![0.0; n];
    while triplets.len() < target {
        let k = rng.index(slots);
        if !taken.insert(k) {
            continue;
        }
        let (i, c) = (k / (n - 1), k % (n - 1));
        let j = if c >= i { c + 1 } else { c };
        let v = rng.range(-s, s);
        row_sums[i] += v.abs();
        triplets.push((i, j, v));
    }
    triplets.extend(
        row_sums
            .iter()
            .enumerate()
            .map(|(i, sum)| (i, i, spec.diag_offset + sum)),
    );
    let t = SparseMatrix::from_triplets(n, n, &triplets)?;
    PwlsProblem::new(t, rng.vector(n))
}

/// Ridge added to the Gram matrix in [`gen_spd`].
pub const SPD_RIDGE: f64 = 0.1;

/// `T = MMᵀ/n + 0.1·I` with `M` uniform on `[−1, 1]`, `b` uniform.
pub fn gen_spd(spec: &GenSpec) -> Result<PwlsProblem> {
    expect_kind(spec, GenKind::Spd)?;
    let n = spec.n;
    let mut rng = Uniform::new(spec.seed);
    let m = DenseMatrix::new(n, n, rng.vector(n * n))?;
    let mut t = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = m.row(i).iter().zip(m.row(j)).map(|(a, b)| a * b).sum::<f64>() / n as f64;
            t.set(i, j, v);
            t.set(j, i, v);
        }
        t.set(i, i, t.get(i, i) + SPD_RIDGE);
    }
    PwlsProblem::new(t, rng.vector(n))
}

/// `tᵢᵢ` uniform on `[−3, 3]` at distance at least 0.05 from 0 and −1;
/// `b` uniform on `[−1, 1]ⁿ`.
pub fn gen_diagonal(spec: &GenSpec) -> Result<PwlsProblem> {
    expect_kind(spec, GenKind::Diagonal)?;
    let mut rng = Uniform::new(spec.seed);
    let d: Vec<f64> = (0..spec.n)
        .map(|_| loop {
            let t = rng.range(-3.0, 3.0);
            if t.abs() >= 0.05 && (t + 1.0).abs() >= 0.05 {
                break t;
            }
        })
        .collect();
    PwlsProblem::new(SparseMatrix::from_diagonal(&d), rng.vector(spec.n))
}

pub fn generate(spec: &GenSpec) -> Result<PwlsProblem> {
    match spec.kind {
        GenKind::Dense => gen_dense_sdd(spec),
        GenKind::Sparse => gen_sparse_sdd(spec),
        GenKind::Spd => gen_spd(spec),
        GenKind::Diagonal => gen_diagonal(spec),
    }
}

pub const CANONICAL_NAMES: [&str; 2] = ["spd_3cycle", "diagdom_nosolution"];

/// A built-in instance together with Newton cycles it admits.
#[derive(Debug, Clone, PartialEq)]
pub struct Canonical {
    pub name: &'static str,
    pub problem: PwlsProblem,
    /// Each entry is one cycle, listed in iteration order.
    pub cycles: Vec<Vec<Vec<f64>>>,
}

impl Canonical {
    /// All cycle points, cycle after cycle.
    pub fn witness(&self) -> Vec<Vec<f64>> {
        self.cycles.iter().flatten().cloned().collect()
    }
}

fn ratios(entries: &[(f64, f64)]) -> Vec<f64> {
    entries.iter().map(|(p, q)| p / q).collect()
}

/// Cycle points of `spd_3cycle` in the rounded form `(319/1435, …)` and
/// `(−527/2978, …)`. They satisfy the cycle equations only to about 1e-7;
/// the exact points are in [`canonical`].
pub fn spd_3cycle_rounded_witness() -> Vec<Vec<f64>> {
    vec![
        ratios(&[(319.0, 1435.0), (-1849.0, 6379.0), (190.0, 1191.0)]),
        ratios(&[(-527.0, 2978.0), (-1490.0, 923.0), (-81.0, 2777.0)]),
    ]
}

/// Looks up a built-in instance by name; see [`CANONICAL_NAMES`].
///
/// * `spd_3cycle`: symmetric positive definite `T` of order 3 on which Newton
///   cycles through three points.
/// * `diagdom_nosolution`: diagonally dominant `T` of order 2 with no
///   solution, where Newton has two distinct 2-cycles.
pub fn canonical(name: &str) -> Result<Canonical> {
    match name {
        "spd_3cycle" => {
            let t = DenseMatrix::from_rows(&[
                ratios(&[(32.0, 100.0), (-26.0, 100.0), (21.0, 100.0)]),
                ratios(&[(-26.0, 100.0), (33.0, 100.0), (-23.0, 100.0)]),
                ratios(&[(21.0, 100.0), (-23.0, 100.0), (17.0, 100.0)]),
            ])?;
            let b = ratios(&[(18.0, 100.0), (-48.0, 100.0), (30.0, 100.0)]);
            let cycle = vec![
                ratios(&[(81894.0, 368395.0), (-106782.0, 368395.0), (11754.0, 73679.0)]),
                ratios(&[(-21902.0, 123765.0), (-66598.0, 41255.0), (-722.0, 24753.0)]),
                ratios(&[(-306.0, 95.0), (18.0, 95.0), (6.0, 1.0)]),
            ];
            Ok(Canonical {
                name: "spd_3cycle",
                problem: PwlsProblem::new(t, b)?,
                cycles: vec![cycle],
            })
        }
        "diagdom_nosolution" => {
            let t = DenseMatrix::from_rows(&[
                ratios(&[(-26.0, 100.0), (16.0, 100.0)]),
                ratios(&[(23.0, 100.0), (-33.0, 100.0)]),
            ])?;
            let b = ratios(&[(-12.0, 100.0), (12.0, 100.0)]);
            let first = vec![
                ratios(&[(-498.0, 2295.0), (582.0, 2295.0)]),
                ratios(&[(498.0, 1055.0), (18.0, 1055.0)]),
            ];
            let second = vec![
                ratios(&[(102.0, 245.0), (-18.0, 245.0)]),
                ratios(&[(-102.0, 1405.0), (-582.0, 1405.0)]),
            ];
            Ok(Canonical {
                name: "diagdom_nosolution",
                problem: PwlsProblem::new(t, b)?,
                cycles: vec![first, second],
            })
        }
        _ => Err(Error::UnknownName(name.to_string())),
    }
}
