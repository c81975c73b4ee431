//! The system `x⁺ + Tx = b`, its residual map, sign patterns and the
//! `D + L + U` splitting shared by the iterations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{norm2, DenseMatrix, Matrix, PentaBandMatrix, RowAccess, SparseMatrix, StorageKind};
use crate::solvers::Method;

/// The pair `(T, b)` of `x⁺ + Tx = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PwlsProblem {
    t: Matrix,
    b: Vec<f64>,
}

impl PwlsProblem {
    pub fn new(t: impl Into<Matrix>, b: Vec<f64>) -> Result<Self> {
        let t = t.into();
        if !t.is_square() {
            return Err(Error::NotSquare {
                rows: t.n_rows(),
                cols: t.n_cols(),
            });
        }
        check_len(t.n_rows(), b.len())?;
        if let Some(i) = b.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "right-hand side entry {i} is not finite"
            )));
        }
        Ok(Self { t, b })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.t
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn storage(&self) -> StorageKind {
        self.t.storage()
    }

    pub fn into_parts(self) -> (Matrix, Vec<f64>) {
        (self.t, self.b)
    }

    /// `F(x) = x⁺ + Tx − b`.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.t.matvec(x)?;
        for ((ri, &xi), &bi) in r.iter_mut().zip(x).zip(&self.b) {
            *ri += xi.max(0.0) - bi;
        }
        Ok(r)
    }

    pub fn residual_norm(&self, x: &[f64]) -> Result<f64> {
        Ok(norm2(&self.residual(x)?))
    }
}

/// `F(x) = x⁺ + Tx − b`.
pub fn residual(p: &PwlsProblem, x: &[f64]) -> Result<Vec<f64>> {
    p.residual(x)
}

pub fn positive_part(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v.max(0.0)).collect()
}

pub fn negative_part(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| (-v).max(0.0)).collect()
}

/// The diagonal of `P(x) = diag(sgn(x⁺))`, packed one bit per entry.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<u8>", try_from = "Vec<u8>")]
pub struct SignPattern {
    len: usize,
    words: Vec<u64>,
}

impl SignPattern {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// `sᵢ = 1` iff `xᵢ > 0`. Zero maps to 0.
    pub fn of(x: &[f64]) -> Self {
        let mut s = Self::zeros(x.len());
        for (i, &v) in x.iter().enumerate() {
            if v > 0.0 {
                s.words[i / 64] |= 1 << (i % 64);
            }
        }
        s
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            s.words[i / 64] |= 1 << (i % 64);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "index {i} out of range for pattern of length {}",
            self.len
        );
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// The pattern as a 0/1 vector of reals, i.e. the diagonal of `P(x)`.
    pub fn to_diagonal(&self) -> Vec<f64> {
        self.iter().map(|b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }
}

impl fmt::Debug for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        write!(f, "SignPattern({s})")
    }
}

impl From<SignPattern> for Vec<u8> {
    fn from(s: SignPattern) -> Self {
        s.to_vec()
    }
}

impl TryFrom<Vec<u8>> for SignPattern {
    type Error = String;

    fn try_from(v: Vec<u8>) -> std::result::Result<Self, String> {
        if let Some(bad) = v.iter().find(|&&b| b > 1) {
            return Err(format!("sign pattern entries must be 0 or 1, found {bad}"));
        }
        Ok(Self::from_bits(&v.iter().map(|&b| b == 1).collect::<Vec<_>>()))
    }
}

pub fn sign_pattern(x: &[f64]) -> SignPattern {
    SignPattern::of(x)
}

/// `T = D + L + U`; `lower` and `upper` keep the storage of `T` and have a
/// zero (or absent) diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    pub diag: Vec<f64>,
    pub lower: Matrix,
    pub upper: Matrix,
}

impl Splitting {
    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// `D + L + U` as a dense matrix.
    pub fn reassemble(&self) -> DenseMatrix {
        let mut t = self.lower.to_dense();
        let u = self.upper.to_dense();
        for i in 0..self.order() {
            for j in 0..self.order() {
                t.set(i, j, t.get(i, j) + u.get(i, j));
            }
            t.set(i, i, t.get(i, i) + self.diag[i]);
        }
        t
    }
}

pub fn split_dlu(t: &Matrix) -> Result<Splitting> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.n_rows(),
            cols: t.n_cols(),
        });
    }
    let n = t.n_rows();
    let diag = t.diagonal();
    let (lower, upper) = match t {
        Matrix::Dense(d) => {
            let mut lo = DenseMatrix::zeros(n, n);
            let mut up = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for (j, &v) in d.row(i).iter().enumerate() {
                    if j < i {
                        lo.set(i, j, v);
                    } else if j > i {
                        up.set(i, j, v);
                    }
                }
            }
            (Matrix::Dense(lo), Matrix::Dense(up))
        }
        Matrix::Sparse(s) => {
            let (lo, up): (Vec<_>, Vec<_>) = s.triplets().filter(|&(i, j, _)| i != j).partition(|&(i, j, _)| j < i);
            (
                Matrix::Sparse(SparseMatrix::from_triplets(n, n, &lo)?),
                Matrix::Sparse(SparseMatrix::from_triplets(n, n, &up)?),
            )
        }
        Matrix::Band(b) => {
            let (lo, up): (PentaBandMatrix, PentaBandMatrix) = b.strict_parts();
            (Matrix::Band(lo), Matrix::Band(up))
        }
    };
    Ok(Splitting { diag, lower, upper })
}

/// Indices whose sign agrees between two consecutive Newton iterates. At each
/// such index the residual of `x_next` vanishes.
pub fn componentwise_certificate(p: &PwlsProblem, x_prev: &[f64], x_next: &[f64]) -> Result<Vec<usize>> {
    check_len(p.n(), x_prev.len())?;
    check_len(p.n(), x_next.len())?;
    Ok(x_prev
        .iter()
        .zip(x_next)
        .enumerate()
        .filter(|(_, (&a, &b))| (a > 0.0) == (b > 0.0))
        .map(|(i, _)| i)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Stop once `‖F(x)‖₂` is at or below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub record_trace: bool,
    /// Stop Newton when a sign pattern repeats. Ignored by the other methods.
    pub cycle_detection: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-5,
            max_iterations: 1000,
            record_trace: false,
            cycle_detection: true,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    Converged,
    /// A Newton sign pattern came back after `length` iterations.
    CycleDetected {
        length: usize,
    },
    MaxIterations,
    /// Two consecutive Newton iterates share a sign pattern, so the iterate is
    /// a fixed point of the step, yet rounding keeps the residual above the
    /// tolerance.
    Stalled,
    /// The step system was singular at `iteration`; `row` is where
    /// elimination broke down.
    SingularStep {
        iteration: usize,
        row: usize,
    },
}

impl Status {
    pub fn is_converged(&self) -> bool {
        matches!(self, Status::Converged)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::CycleDetected { .. } => "cycle_detected",
            Status::MaxIterations => "max_iterations",
            Status::Stalled => "stalled",
            Status::SingularStep { .. } => "singular_step",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: Method,
    pub status: Status,
    /// Number of steps taken.
    pub iterations: usize,
    /// `‖F(x)‖₂` at the returned iterate.
    pub final_residual: f64,
    /// `‖F(xᵏ)‖₂` for `k = 0..=iterations`, starting point included.
    pub residual_history: Vec<f64>,
    pub x: Vec<f64>,
    /// True when the last two Newton iterates share a sign pattern, which
    /// makes the final iterate an exact solution up to rounding.
    pub certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern_trace: Option<Vec<SignPattern>>,
    /// For a detected cycle, its points in iteration order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cycle_points: Vec<Vec<f64>>,
    pub wall_time_s: f64,
    pub cpu_time_s: f64,
}
