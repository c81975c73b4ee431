use super::RowAccess;
use crate::error::{check_len, Error, Result};

/// Solves `L x = b` where `L` is the lower triangle (diagonal included) of
/// `lower`; entries above the diagonal are ignored.
pub fn forward_substitution<M: RowAccess + ?Sized>(lower: &M, b: &[f64]) -> Result<Vec<f64>> {
    forward_substitution_shifted(lower, None, b)
}

/// Forward solve with `shift[i]` added to each diagonal entry.
pub fn forward_substitution_shifted<M: RowAccess + ?Sized>(
    lower: &M,
    shift: Option<&[f64]>,
    b: &[f64],
) -> Result<Vec<f64>> {
    let n = lower.n_rows();
    check_len(n, b.len())?;
    if let Some(s) = shift {
        check_len(n, s.len())?;
    }
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut acc = b[i];
        let mut d = shift.map_or(0.0, |s| s[i]);
        lower.for_each_in_row(i, |j, v| {
            if j < i {
                acc -= v * x[j];
            } else if j == i {
                d += v;
            }
        });
        if d == 0.0 {
            return Err(Error::ZeroDiagonal(i));
        }
        x[i] = acc / d;
    }
    Ok(x)
}

/// `x_i = b_i / d_i`.
pub fn diagonal_solve(d: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    check_len(d.len(), b.len())?;
    d.iter()
        .zip(b)
        .enumerate()
        .map(|(i, (&di, &bi))| {
            if di == 0.0 {
                Err(Error::ZeroDiagonal(i))
            } else {
                Ok(bi / di)
            }
        })
        .collect()
}
