use super::{LuOptions, PentaBandMatrix, Pivoting, RowAccess};
use crate::error::{check_len, Error, Result};

/// Banded LU with partial pivoting, confined to the band profile.
///
/// With lower and upper bandwidth `w` (the band offset), row interchanges can
/// push `U` out to bandwidth `2w`, so each working row keeps the columns
/// `[r - w, r + 2w]`. The multipliers live in a separate `n x w` array and are
/// replayed in elimination order during the solve.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    bw: usize,
    width: usize,
    rows: Vec<f64>,
    multipliers: Vec<f64>,
    swaps: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &PentaBandMatrix, shift: Option<&[f64]>, opts: &LuOptions) -> Result<Self> {
        let n = a.order();
        let bw = a.offset().min(n.saturating_sub(1)).max(1);
        let width = 3 * bw + 1;
        let mut rows = vec![0.0; n * width];
        let at = |r: usize, c: usize| r * width + c + bw - r;
        for r in 0..n {
            a.for_each_in_row(r, |c, v| rows[at(r, c)] += v);
            if let Some(s) = shift {
                rows[at(r, r)] += s[r];
            }
        }
        let drop = opts.drop_tolerance * super::norm_inf(&rows);
        let mut multipliers = vec![0.0; n * bw];
        let mut swaps = vec![0usize; n];

        for k in 0..n {
            let last = (k + bw).min(n - 1);
            let right = (k + 2 * bw).min(n - 1);
            let p = match opts.pivoting {
                Pivoting::Partial => (k..=last)
                    .max_by(|&i, &j| rows[at(i, k)].abs().total_cmp(&rows[at(j, k)].abs()))
                    .unwrap_or(k),
                Pivoting::Diagonal => k,
            };
            let pivot = rows[at(p, k)];
            if !(pivot.abs() > drop) {
                return Err(Error::SingularMatrix { pivot: k });
            }
            swaps[k] = p;
            if p != k {
                for c in k..=right {
                    rows.swap(at(k, c), at(p, c));
                }
            }
            for r in k + 1..=last {
                let l = rows[at(r, k)] / pivot;
                multipliers[k * bw + (r - k - 1)] = l;
                rows[at(r, k)] = 0.0;
                if l != 0.0 {
                    for c in k + 1..=right {
                        rows[at(r, c)] -= l * rows[at(k, c)];
                    }
                }
            }
        }
        Ok(Self {
            n,
            bw,
            width,
            rows,
            multipliers,
            swaps,
        })
    }

    fn at(&self, r: usize, c: usize) -> usize {
        r * self.width + c + self.bw - r
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, b.len())?;
        let (n, bw) = (self.n, self.bw);
        let mut y = b.to_vec();
        for k in 0..n {
            y.swap(k, self.swaps[k]);
            let yk = y[k];
            let last = (k + bw).min(n - 1);
            for r in k + 1..=last {
                y[r] -= self.multipliers[k * bw + (r - k - 1)] * yk;
            }
        }
        for k in (0..n).rev() {
            let right = (k + 2 * bw).min(n - 1);
            let mut s = y[k];
            for c in k + 1..=right {
                s -= self.rows[self.at(k, c)] * y[c];
            }
            y[k] = s / self.rows[self.at(k, k)];
        }
        Ok(y)
    }

    pub fn pivots(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.rows[self.at(k, k)]).collect()
    }
}
