//! Dense, compressed-sparse-row and pentadiagonal-band storage, plus the
//! direct solve kernels used by the iterations.
//!
//! Every storage type exposes its rows through [`RowAccess`], which is all the
//! Jacobi and Gauss-Seidel style sweeps need. Full solves go through
//! [`Factorizer`], which picks the LU variant that matches the storage.

mod band_lu;
mod dense_lu;
mod ordering;
mod sparse_lu;
mod triangular;

pub use band_lu::BandLu;
pub use dense_lu::DenseLu;
pub use ordering::minimum_degree;
pub use sparse_lu::SparseLu;
pub use triangular::{diagonal_solve, forward_substitution, forward_substitution_shifted};

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Read access to the stored entries of one row, in increasing column order.
pub trait RowAccess {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    fn for_each_in_row<F: FnMut(usize, f64)>(&self, row: usize, f: F);
}

/// Computes `a * x`.
pub fn matvec<M: RowAccess + ?Sized>(a: &M, x: &[f64]) -> Result<Vec<f64>> {
    check_len(a.n_cols(), x.len())?;
    Ok((0..a.n_rows())
        .map(|i| {
            let mut acc = 0.0;
            a.for_each_in_row(i, |j, v| acc += v * x[j]);
            acc
        })
        .collect())
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dist_inf(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(k) => Err(Error::InvalidMatrix(format!("non-finite entry at position {k}"))),
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len(n_rows * n_cols, data.len())?;
        check_finite(&data)?;
        Ok(Self { n_rows, n_cols, data })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            check_len(n_cols, r.len())?;
            data.extend_from_slice(r);
        }
        Self::new(n_rows, n_cols, data)
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n_cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in 0..self.n_cols {
                t.data[j * self.n_rows + i] = self.data[i * self.n_cols + j];
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.data)
    }

    /// `a*self + b*other`, entrywise.
    pub fn combine(&self, a: f64, other: &DenseMatrix, b: f64) -> Result<Self> {
        check_len(self.n_rows, other.n_rows)?;
        check_len(self.n_cols, other.n_cols)?;
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data,
        })
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        check_len(self.n_cols, other.n_rows)?;
        let mut out = Self::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            let out_row = &mut out.data[i * other.n_cols..(i + 1) * other.n_cols];
            for k in 0..self.n_cols {
                let a = self.data[i * self.n_cols + k];
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }
}

impl RowAccess for DenseMatrix {
    fn n_rows(&self) -> usize {
        self.n_rows
    }

    fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    fn for_each_in_row<F: FnMut(usize, f64)>(&self, row: usize, mut f: F) {
        for (j, &v) in self.row(row).iter().enumerate() {
            f(j, v);
        }
    }
}

/// Compressed sparse row matrix. Column indices are strictly increasing within
/// each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_len(n_rows + 1, row_offsets.len())?;
        check_len(col_indices.len(), values.len())?;
        if row_offsets[0] != 0 || row_offsets[n_rows] != values.len() {
            return Err(Error::InvalidMatrix("row offsets do not span the entries".into()));
        }
        for i in 0..n_rows {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(Error::InvalidMatrix(format!("row offsets decrease at row {i}")));
            }
            let cols = &col_indices[lo..hi];
            if cols.iter().any(|&j| j >= n_cols) {
                return Err(Error::InvalidMatrix(format!("column index out of bounds in row {i}")));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidMatrix(format!(
                    "column indices not strictly increasing in row {i}"
                )));
            }
        }
        check_finite(&values)?;
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; n_rows + 1];
        for &(i, j, _) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::InvalidMatrix(format!("entry ({i}, {j}) out of bounds")));
            }
            counts[i + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for i in 0..n_rows {
            scratch.clear();
            scratch.extend((counts[i]..counts[i + 1]).map(|p| (cols[p], vals[p])));
            scratch.sort_by_key(|e| e.0);
            for &(j, v) in &scratch {
                if col_indices.len() > row_offsets[i] && *col_indices.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self::new(n_rows, n_cols, row_offsets, col_indices, values)
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: d.to_vec(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut triplets = Vec::new();
        for i in 0..a.n_rows {
            for (j, &v) in a.row(i).iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(a.n_rows, a.n_cols, &triplets).expect("dense entries are in bounds")
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |p| vals[p])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d.set(i, j, v);
            }
        }
        d
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.n_cols, self.n_rows, &triplets).expect("transpose stays in bounds")
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.values)
    }
}

impl RowAccess for SparseMatrix {
    fn n_rows(&self) -> usize {
        self.n_rows
    }

    fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    fn for_each_in_row<F: FnMut(usize, f64)>(&self, row: usize, mut f: F) {
        let (cols, vals) = self.row(row);
        for (&j, &v) in cols.iter().zip(vals) {
            f(j, v);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Bands {
    Symmetric {
        near: Vec<f64>,
        far: Vec<f64>,
    },
    General {
        lower_near: Vec<f64>,
        upper_near: Vec<f64>,
        lower_far: Vec<f64>,
        upper_far: Vec<f64>,
    },
}

/// Square matrix with nonzeros only on the main diagonal, the first
/// off-diagonals and the off-diagonals at distance `offset`.
///
/// This is the five-point stencil layout of a `side x side` grid numbered row
/// by row, with `offset = side`. Band `near[k]` couples unknowns `k` and `k+1`,
/// band `far[k]` couples `k` and `k+offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct PentaBandMatrix {
    order: usize,
    offset: usize,
    diag: Vec<f64>,
    bands: Bands,
}

impl PentaBandMatrix {
    pub fn symmetric(offset: usize, diag: Vec<f64>, near: Vec<f64>, far: Vec<f64>) -> Result<Self> {
        let order = diag.len();
        Self::check_bands(order, offset, &near, &far)?;
        for v in [&diag, &near, &far] {
            check_finite(v)?;
        }
        Ok(Self {
            order,
            offset,
            diag,
            bands: Bands::Symmetric { near, far },
        })
    }

    pub fn general(
        offset: usize,
        diag: Vec<f64>,
        lower_near: Vec<f64>,
        upper_near: Vec<f64>,
        lower_far: Vec<f64>,
        upper_far: Vec<f64>,
    ) -> Result<Self> {
        let order = diag.len();
        Self::check_bands(order, offset, &lower_near, &lower_far)?;
        Self::check_bands(order, offset, &upper_near, &upper_far)?;
        for v in [&diag, &lower_near, &upper_near, &lower_far, &upper_far] {
            check_finite(v)?;
        }
        Ok(Self {
            order,
            offset,
            diag,
            bands: Bands::General {
                lower_near,
                upper_near,
                lower_far,
                upper_far,
            },
        })
    }

    fn check_bands(order: usize, offset: usize, near: &[f64], far: &[f64]) -> Result<()> {
        if offset < 2 {
            return Err(Error::InvalidMatrix("band offset must be at least 2".into()));
        }
        check_len(order.saturating_sub(1), near.len())?;
        check_len(order.saturating_sub(offset), far.len())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn is_symmetric_storage(&self) -> bool {
        matches!(self.bands, Bands::Symmetric { .. })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    fn lower_near(&self) -> &[f64] {
        match &self.bands {
            Bands::Symmetric { near, .. } => near,
            Bands::General { lower_near, .. } => lower_near,
        }
    }

    fn upper_near(&self) -> &[f64] {
        match &self.bands {
            Bands::Symmetric { near, .. } => near,
            Bands::General { upper_near, .. } => upper_near,
        }
    }

    fn lower_far(&self) -> &[f64] {
        match &self.bands {
            Bands::Symmetric { far, .. } => far,
            Bands::General { lower_far, .. } => lower_far,
        }
    }

    fn upper_far(&self) -> &[f64] {
        match &self.bands {
            Bands::Symmetric { far, .. } => far,
            Bands::General { upper_far, .. } => upper_far,
        }
    }

    /// Splits into (strictly lower, strictly upper) parts with the same layout.
    pub fn strict_parts(&self) -> (Self, Self) {
        let zeros = |len: usize| vec![0.0; len];
        let n = self.order;
        let lower = Self {
            order: n,
            offset: self.offset,
            diag: zeros(n),
            bands: Bands::General {
                lower_near: self.lower_near().to_vec(),
                upper_near: zeros(self.upper_near().len()),
                lower_far: self.lower_far().to_vec(),
                upper_far: zeros(self.upper_far().len()),
            },
        };
        let upper = Self {
            order: n,
            offset: self.offset,
            diag: zeros(n),
            bands: Bands::General {
                lower_near: zeros(self.lower_near().len()),
                upper_near: self.upper_near().to_vec(),
                lower_far: zeros(self.lower_far().len()),
                upper_far: self.upper_far().to_vec(),
            },
        };
        (lower, upper)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.order;
        let mut d = DenseMatrix::zeros(n, n);
        for i in 0..n {
            self.for_each_in_row(i, |j, v| d.set(i, j, v));
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        [
            self.diag.as_slice(),
            self.lower_near(),
            self.upper_near(),
            self.lower_far(),
            self.upper_far(),
        ]
        .iter()
        .map(|b| norm_inf(b))
        .fold(0.0, f64::max)
    }
}

impl RowAccess for PentaBandMatrix {
    fn n_rows(&self) -> usize {
        self.order
    }

    fn n_cols(&self) -> usize {
        self.order
    }

    #[inline]
    fn for_each_in_row<F: FnMut(usize, f64)>(&self, i: usize, mut f: F) {
        let (n, m) = (self.order, self.offset);
        if i >= m {
            f(i - m, self.lower_far()[i - m]);
        }
        if i >= 1 {
            f(i - 1, self.lower_near()[i - 1]);
        }
        f(i, self.diag[i]);
        if i + 1 < n {
            f(i + 1, self.upper_near()[i]);
        }
        if i + m < n {
            f(i + m, self.upper_far()[i]);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageKind {
    Dense,
    Sparse,
    Band,
}

/// A matrix in any of the supported storages.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
    Band(PentaBandMatrix),
}

macro_rules! dispatch {
    ($m:expr, $a:ident => $body:expr) => {
        match $m {
            Matrix::Dense($a) => $body,
            Matrix::Sparse($a) => $body,
            Matrix::Band($a) => $body,
        }
    };
}

impl Matrix {
    pub fn storage(&self) -> StorageKind {
        match self {
            Matrix::Dense(_) => StorageKind::Dense,
            Matrix::Sparse(_) => StorageKind::Sparse,
            Matrix::Band(_) => StorageKind::Band,
        }
    }

    pub fn is_square(&self) -> bool {
        self.n_rows() == self.n_cols()
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        dispatch!(self, a => matvec(a, x))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.n_rows().min(self.n_cols());
        match self {
            Matrix::Band(b) => b.diagonal().to_vec(),
            _ => {
                let mut d = vec![0.0; n];
                for (i, di) in d.iter_mut().enumerate() {
                    self.for_each_in_row(i, |j, v| {
                        if j == i {
                            *di = v;
                        }
                    });
                }
                d
            }
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(d) => d.clone(),
            Matrix::Sparse(s) => s.to_dense(),
            Matrix::Band(b) => b.to_dense(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        dispatch!(self, a => a.max_abs())
    }

    /// Rows whose stored entries are all zero.
    pub fn empty_rows(&self) -> Vec<bool> {
        (0..self.n_rows())
            .map(|i| {
                let mut empty = true;
                self.for_each_in_row(i, |_, v| empty &= v == 0.0);
                empty
            })
            .collect()
    }

    /// Applies `f` to every stored entry, keeping the storage layout.
    pub fn map_entries(&self, f: impl Fn(usize, usize, f64) -> f64) -> Matrix {
        match self {
            Matrix::Dense(d) => {
                let mut out = d.clone();
                for i in 0..d.n_rows {
                    for j in 0..d.n_cols {
                        out.set(i, j, f(i, j, d.get(i, j)));
                    }
                }
                Matrix::Dense(out)
            }
            Matrix::Sparse(s) => {
                let mut out = s.clone();
                for i in 0..s.n_rows {
                    for p in s.row_offsets[i]..s.row_offsets[i + 1] {
                        out.values[p] = f(i, s.col_indices[p], s.values[p]);
                    }
                }
                Matrix::Sparse(out)
            }
            Matrix::Band(b) => {
                let (n, m) = (b.order, b.offset);
                let diag = (0..n).map(|i| f(i, i, b.diag[i])).collect();
                let ln = (0..n.saturating_sub(1))
                    .map(|k| f(k + 1, k, b.lower_near()[k]))
                    .collect();
                let un = (0..n.saturating_sub(1))
                    .map(|k| f(k, k + 1, b.upper_near()[k]))
                    .collect();
                let lf = (0..n.saturating_sub(m))
                    .map(|k| f(k + m, k, b.lower_far()[k]))
                    .collect();
                let uf = (0..n.saturating_sub(m))
                    .map(|k| f(k, k + m, b.upper_far()[k]))
                    .collect();
                Matrix::Band(PentaBandMatrix {
                    order: n,
                    offset: m,
                    diag,
                    bands: Bands::General {
                        lower_near: ln,
                        upper_near: un,
                        lower_far: lf,
                        upper_far: uf,
                    },
                })
            }
        }
    }
}

impl RowAccess for Matrix {
    fn n_rows(&self) -> usize {
        dispatch!(self, a => a.n_rows())
    }

    fn n_cols(&self) -> usize {
        dispatch!(self, a => a.n_cols())
    }

    #[inline]
    fn for_each_in_row<F: FnMut(usize, f64)>(&self, row: usize, f: F) {
        dispatch!(self, a => a.for_each_in_row(row, f))
    }
}

impl From<DenseMatrix> for Matrix {
    fn from(m: DenseMatrix) -> Self {
        Matrix::Dense(m)
    }
}

impl From<SparseMatrix> for Matrix {
    fn from(m: SparseMatrix) -> Self {
        Matrix::Sparse(m)
    }
}

impl From<PentaBandMatrix> for Matrix {
    fn from(m: PentaBandMatrix) -> Self {
        Matrix::Band(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    Natural,
    /// Minimum degree on the pattern of `A + Aᵀ`, applied symmetrically.
    MinimumDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pivoting {
    Partial,
    /// Pivot on the (permuted) diagonal only. A symmetric matrix is positive
    /// definite iff every pivot produced this way is positive.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuOptions {
    pub ordering: Ordering,
    pub pivoting: Pivoting,
    /// Pivots with magnitude at or below `drop_tolerance * max|A|` are singular.
    pub drop_tolerance: f64,
}

impl Default for LuOptions {
    fn default() -> Self {
        Self {
            ordering: Ordering::Natural,
            pivoting: Pivoting::Partial,
            drop_tolerance: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Factorization {
    Dense(DenseLu),
    Sparse(SparseLu),
    Band(BandLu),
}

impl Factorization {
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            Factorization::Dense(f) => f.solve(b),
            Factorization::Sparse(f) => f.solve(b),
            Factorization::Band(f) => f.solve(b),
        }
    }

    /// The diagonal of `U`, in elimination order.
    pub fn pivots(&self) -> Vec<f64> {
        match self {
            Factorization::Dense(f) => f.pivots(),
            Factorization::Sparse(f) => f.pivots(),
            Factorization::Band(f) => f.pivots(),
        }
    }
}

/// Factors `A + diag(shift)` repeatedly for a fixed `A`, reusing the
/// fill-reducing ordering across calls.
#[derive(Debug, Clone)]
pub struct Factorizer<'a> {
    matrix: &'a Matrix,
    options: LuOptions,
    column_order: Option<Vec<usize>>,
}

impl<'a> Factorizer<'a> {
    pub fn new(matrix: &'a Matrix, options: LuOptions) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.n_rows(),
                cols: matrix.n_cols(),
            });
        }
        let column_order = match (matrix, options.ordering) {
            (Matrix::Sparse(s), Ordering::MinimumDegree) => Some(minimum_degree(s)),
            _ => None,
        };
        Ok(Self {
            matrix,
            options,
            column_order,
        })
    }

    pub fn factor(&self, shift: Option<&[f64]>) -> Result<Factorization> {
        if let Some(s) = shift {
            check_len(self.matrix.n_rows(), s.len())?;
        }
        Ok(match self.matrix {
            Matrix::Dense(d) => Factorization::Dense(DenseLu::factor(d, shift, &self.options)?),
            Matrix::Sparse(s) => {
                Factorization::Sparse(SparseLu::factor(s, shift, self.column_order.as_deref(), &self.options)?)
            }
            Matrix::Band(b) => Factorization::Band(BandLu::factor(b, shift, &self.options)?),
        })
    }
}

/// Solves `A x = b` with the LU variant matching the storage of `A`.
pub fn lu_solve(a: &Matrix, b: &[f64], options: &LuOptions) -> Result<Vec<f64>> {
    check_len(a.n_rows(), b.len())?;
    Factorizer::new(a, *options)?.factor(None)?.solve(b)
}
