//! Left-looking sparse LU (Gilbert-Peierls) with threshold partial pivoting.
//!
//! Column `k` of the factors comes from a sparse triangular solve against the
//! columns already computed; its nonzero pattern is found by a depth-first
//! search over the graph of `L` before any arithmetic happens.

use super::{LuOptions, Pivoting, SparseMatrix};
use crate::error::{check_len, Error, Result};

const UNSET: usize = usize::MAX;

/// A pivot candidate on the diagonal is accepted when it is at least this
/// fraction of the largest candidate in its column.
const DIAGONAL_PREFERENCE: f64 = 0.1;

/// Compressed sparse column storage.
#[derive(Debug, Clone, Default)]
struct Csc {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl Csc {
    /// `A + diag(shift)` in column form; every diagonal entry is stored.
    fn from_csr_with_shift(a: &SparseMatrix, shift: Option<&[f64]>) -> Self {
        let n = a.n_rows;
        let mut counts = vec![0usize; n + 1];
        for i in 0..n {
            let (cols, _) = a.row(i);
            for &j in cols {
                counts[j + 1] += 1;
            }
            if cols.binary_search(&i).is_err() {
                counts[i + 1] += 1;
            }
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let nnz = counts[n];
        let mut next = counts.clone();
        let mut row_idx = vec![0usize; nnz];
        let mut vals = vec![0.0; nnz];
        let mut put = |i: usize, j: usize, v: f64| {
            row_idx[next[j]] = i;
            vals[next[j]] = v;
            next[j] += 1;
        };
        // Rows are visited in increasing order, so each column comes out sorted.
        for i in 0..n {
            let s = shift.map_or(0.0, |s| s[i]);
            let (cols, values) = a.row(i);
            let mut diagonal_done = false;
            for (&j, &v) in cols.iter().zip(values) {
                if j == i {
                    put(i, j, v + s);
                    diagonal_done = true;
                } else {
                    if j > i && !diagonal_done {
                        put(i, i, s);
                        diagonal_done = true;
                    }
                    put(i, j, v);
                }
            }
            if !diagonal_done {
                put(i, i, s);
            }
        }
        Csc {
            col_ptr: counts,
            row_idx,
            vals,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    lower: Csc,
    upper: Csc,
    /// `row_pos[i]` is the elimination step at which original row `i` pivoted.
    row_pos: Vec<usize>,
    /// `col_order[k]` is the original column eliminated at step `k`.
    col_order: Vec<usize>,
}

struct Workspace {
    x: Vec<f64>,
    pattern: Vec<usize>,
    stack: Vec<usize>,
    cursor: Vec<usize>,
    mark: Vec<usize>,
    stamp: usize,
}

impl SparseLu {
    pub fn factor(
        a: &SparseMatrix,
        shift: Option<&[f64]>,
        col_order: Option<&[usize]>,
        opts: &LuOptions,
    ) -> Result<Self> {
        if a.n_rows != a.n_cols {
            return Err(Error::NotSquare {
                rows: a.n_rows,
                cols: a.n_cols,
            });
        }
        let n = a.n_rows;
        let col_order: Vec<usize> = match col_order {
            Some(q) => {
                check_len(n, q.len())?;
                q.to_vec()
            }
            None => (0..n).collect(),
        };
        let csc = Csc::from_csr_with_shift(a, shift);
        let drop = opts.drop_tolerance * super::norm_inf(&csc.vals);

        let mut lower = Csc {
            col_ptr: Vec::with_capacity(n + 1),
            row_idx: Vec::with_capacity(4 * csc.vals.len()),
            vals: Vec::with_capacity(4 * csc.vals.len()),
        };
        let mut upper = lower.clone();
        let mut row_pos = vec![UNSET; n];
        let mut ws = Workspace {
            x: vec![0.0; n],
            pattern: Vec::with_capacity(n),
            stack: Vec::with_capacity(n),
            cursor: vec![0; n],
            mark: vec![0; n],
            stamp: 0,
        };

        for (k, &col) in col_order.iter().enumerate() {
            lower.col_ptr.push(lower.vals.len());
            upper.col_ptr.push(upper.vals.len());
            Self::column_solve(&lower, &csc, col, &row_pos, &mut ws);

            let mut best = UNSET;
            let mut best_abs = -1.0;
            for &i in ws.pattern.iter().rev() {
                if row_pos[i] == UNSET {
                    let v = ws.x[i].abs();
                    if v > best_abs {
                        best_abs = v;
                        best = i;
                    }
                } else {
                    upper.row_idx.push(row_pos[i]);
                    upper.vals.push(ws.x[i]);
                }
            }
            let diagonal_ok = row_pos[col] == UNSET && ws.mark[col] == ws.stamp;
            let pivot_row = match opts.pivoting {
                Pivoting::Diagonal if diagonal_ok => col,
                Pivoting::Diagonal => return Err(Error::SingularMatrix { pivot: col }),
                Pivoting::Partial => {
                    if diagonal_ok && ws.x[col].abs() >= DIAGONAL_PREFERENCE * best_abs {
                        col
                    } else {
                        best
                    }
                }
            };
            if pivot_row == UNSET || !(ws.x[pivot_row].abs() > drop) {
                return Err(Error::SingularMatrix { pivot: col });
            }
            let pivot = ws.x[pivot_row];
            upper.row_idx.push(k);
            upper.vals.push(pivot);
            row_pos[pivot_row] = k;
            lower.row_idx.push(pivot_row);
            lower.vals.push(1.0);
            for &i in ws.pattern.iter().rev() {
                if row_pos[i] == UNSET {
                    lower.row_idx.push(i);
                    lower.vals.push(ws.x[i] / pivot);
                }
                ws.x[i] = 0.0;
            }
        }
        lower.col_ptr.push(lower.vals.len());
        upper.col_ptr.push(upper.vals.len());
        for r in lower.row_idx.iter_mut() {
            *r = row_pos[*r];
        }
        Ok(Self {
            n,
            lower,
            upper,
            row_pos,
            col_order,
        })
    }

    /// Scatters `L \ A(:, col)` into `ws.x`, with its nonzero pattern in
    /// `ws.pattern` in reverse topological order.
    fn column_solve(lower: &Csc, a: &Csc, col: usize, row_pos: &[usize], ws: &mut Workspace) {
        ws.stamp += 1;
        ws.pattern.clear();
        let stamp = ws.stamp;
        for p in a.col_ptr[col]..a.col_ptr[col + 1] {
            let start = a.row_idx[p];
            if ws.mark[start] == stamp {
                continue;
            }
            ws.stack.clear();
            ws.stack.push(start);
            ws.mark[start] = stamp;
            ws.cursor[start] = match row_pos[start] {
                UNSET => 0,
                c => lower.col_ptr[c],
            };
            while let Some(&j) = ws.stack.last() {
                let end = match row_pos[j] {
                    UNSET => 0,
                    c => lower.col_ptr[c + 1],
                };
                let mut descended = false;
                while ws.cursor[j] < end {
                    let i = lower.row_idx[ws.cursor[j]];
                    ws.cursor[j] += 1;
                    if ws.mark[i] != stamp {
                        ws.mark[i] = stamp;
                        ws.cursor[i] = match row_pos[i] {
                            UNSET => 0,
                            c => lower.col_ptr[c],
                        };
                        ws.stack.push(i);
                        descended = true;
                        break;
                    }
                }
                if !descended {
                    ws.stack.pop();
                    ws.pattern.push(j);
                }
            }
        }
        for &i in &ws.pattern {
            ws.x[i] = 0.0;
        }
        for p in a.col_ptr[col]..a.col_ptr[col + 1] {
            ws.x[a.row_idx[p]] = a.vals[p];
        }
        // `pattern` holds a post-order; walking it backwards is topological.
        for idx in (0..ws.pattern.len()).rev() {
            let j = ws.pattern[idx];
            let c = row_pos[j];
            if c == UNSET {
                continue;
            }
            let xj = ws.x[j];
            if xj == 0.0 {
                continue;
            }
            // The unit diagonal is stored first in each column of L.
            for p in lower.col_ptr[c] + 1..lower.col_ptr[c + 1] {
                ws.x[lower.row_idx[p]] -= lower.vals[p] * xj;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, b.len())?;
        let n = self.n;
        let mut y = vec![0.0; n];
        for (i, &v) in b.iter().enumerate() {
            y[self.row_pos[i]] = v;
        }
        for k in 0..n {
            let yk = y[k];
            if yk != 0.0 {
                for p in self.lower.col_ptr[k] + 1..self.lower.col_ptr[k + 1] {
                    y[self.lower.row_idx[p]] -= self.lower.vals[p] * yk;
                }
            }
        }
        for k in (0..n).rev() {
            let end = self.upper.col_ptr[k + 1];
            y[k] /= self.upper.vals[end - 1];
            let yk = y[k];
            if yk != 0.0 {
                for p in self.upper.col_ptr[k]..end - 1 {
                    y[self.upper.row_idx[p]] -= self.upper.vals[p] * yk;
                }
            }
        }
        let mut x = vec![0.0; n];
        for (k, &c) in self.col_order.iter().enumerate() {
            x[c] = y[k];
        }
        Ok(x)
    }

    pub fn pivots(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| self.upper.vals[self.upper.col_ptr[k + 1] - 1])
            .collect()
    }

    /// Stored entries in `L` and `U`, counting both unit and pivot diagonals.
    pub fn factor_nnz(&self) -> usize {
        self.lower.vals.len() + self.upper.vals.len()
    }
}
