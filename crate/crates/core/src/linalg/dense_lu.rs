use super::{DenseMatrix, LuOptions, Pivoting};
use crate::error::{check_len, Error, Result};

/// Row-pivoted LU of a dense square matrix, stored in place (unit `L` below
/// the diagonal, `U` on and above).
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    /// `row_perm[k]` is the original row eliminated at step `k`.
    row_perm: Vec<usize>,
}

impl DenseLu {
    pub fn factor(a: &DenseMatrix, shift: Option<&[f64]>, opts: &LuOptions) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.n_rows,
                cols: a.n_cols,
            });
        }
        let n = a.n_rows;
        let mut lu = a.as_slice().to_vec();
        if let Some(s) = shift {
            for (i, v) in s.iter().enumerate() {
                lu[i * n + i] += v;
            }
        }
        let drop = opts.drop_tolerance * super::norm_inf(&lu);
        let mut row_perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let p = match opts.pivoting {
                Pivoting::Partial => (k..n)
                    .max_by(|&i, &j| lu[i * n + k].abs().total_cmp(&lu[j * n + k].abs()))
                    .unwrap_or(k),
                Pivoting::Diagonal => k,
            };
            let pivot = lu[p * n + k];
            if !(pivot.abs() > drop) {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                row_perm.swap(k, p);
            }
            let (head, tail) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n + k + 1..(k + 1) * n];
            for row in tail.chunks_exact_mut(n) {
                let l = row[k] / pivot;
                row[k] = l;
                if l != 0.0 {
                    for (r, u) in row[k + 1..].iter_mut().zip(pivot_row) {
                        *r -= l * u;
                    }
                }
            }
        }
        Ok(Self { n, lu, row_perm })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, b.len())?;
        let n = self.n;
        let mut x: Vec<f64> = self.row_perm.iter().map(|&r| b[r]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }

    pub fn pivots(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.lu[k * self.n + k]).collect()
    }

    pub fn order(&self) -> usize {
        self.n
    }
}
