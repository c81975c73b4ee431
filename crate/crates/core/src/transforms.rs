//! Maps between `x⁺ + Tx = b`, the absolute value equation `T̂x − |x| = b̂`
//! and the nonnegativity-constrained quadratic program
//! `min ½xᵀQx + qᵀx, x ≥ 0`.

use serde::{Deserialize, Serialize};

use crate::analysis::is_symmetric;
use crate::error::{check_len, Error, Result};
use crate::linalg::{norm_inf, DenseMatrix, Factorizer, LuOptions, Matrix, RowAccess};
use crate::problem::PwlsProblem;

/// `T̂x − |x| = b̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct AveProblem {
    pub t_hat: Matrix,
    pub b_hat: Vec<f64>,
}

impl AveProblem {
    pub fn new(t_hat: impl Into<Matrix>, b_hat: Vec<f64>) -> Result<Self> {
        let t_hat = t_hat.into();
        if !t_hat.is_square() {
            return Err(Error::NotSquare {
                rows: t_hat.n_rows(),
                cols: t_hat.n_cols(),
            });
        }
        check_len(t_hat.n_rows(), b_hat.len())?;
        Ok(Self { t_hat, b_hat })
    }

    /// `T̂x − |x| − b̂`.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.t_hat.matvec(x)?;
        for ((ri, xi), bi) in r.iter_mut().zip(x).zip(&self.b_hat) {
            *ri -= xi.abs() + bi;
        }
        Ok(r)
    }
}

/// `T̂ = −2T − I`, `b̂ = −2b`.
///
/// Substituting `x⁺ = (x + |x|)/2` into `x⁺ + Tx = b` and multiplying by −2
/// gives the absolute value form. Every stored entry maps through
/// `t ↦ −2t − [i = j]`, so the storage layout is kept.
pub fn pwls_to_ave(p: &PwlsProblem) -> AveProblem {
    let t_hat = add_to_diagonal(&p.matrix().map_entries(|_, _, v| -2.0 * v), -1.0);
    AveProblem {
        t_hat,
        b_hat: p.rhs().iter().map(|b| -2.0 * b).collect(),
    }
}

/// `T = −(T̂ + I)/2`, `b = −b̂/2`.
pub fn ave_to_pwls(a: &AveProblem) -> Result<PwlsProblem> {
    let t = add_to_diagonal(&a.t_hat, 1.0).map_entries(|_, _, v| -0.5 * v);
    PwlsProblem::new(t, a.b_hat.iter().map(|b| -0.5 * b).collect())
}

/// Adds `c` to each diagonal entry; a sparse matrix gains any diagonal
/// entries it lacks.
fn add_to_diagonal(t: &Matrix, c: f64) -> Matrix {
    match t {
        Matrix::Sparse(s) => {
            let n = s.n_rows();
            let mut triplets: Vec<_> = s.triplets().collect();
            triplets.extend((0..n).map(|i| (i, i, 0.0)));
            let padded = crate::linalg::SparseMatrix::from_triplets(n, s.n_cols(), &triplets)
                .expect("entries come from a valid matrix");
            Matrix::Sparse(padded).map_entries(|i, j, v| if i == j { v + c } else { v })
        }
        _ => t.map_entries(|i, j, v| if i == j { v + c } else { v }),
    }
}

/// `min ½xᵀQx + qᵀx` subject to `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    pub q_mat: DenseMatrix,
    pub q: Vec<f64>,
}

impl QpProblem {
    pub fn new(q_mat: DenseMatrix, q: Vec<f64>) -> Result<Self> {
        if !q_mat.is_square() {
            return Err(Error::NotSquare {
                rows: q_mat.n_rows(),
                cols: q_mat.n_cols(),
            });
        }
        check_len(q_mat.n_rows(), q.len())?;
        if !is_symmetric(&Matrix::Dense(q_mat.clone())) {
            return Err(Error::InvalidMatrix("Q is not symmetric".into()));
        }
        Ok(Self { q_mat, q })
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// `Qz + q`.
    pub fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut g = crate::linalg::matvec(&self.q_mat, z)?;
        for (gi, qi) in g.iter_mut().zip(&self.q) {
            *gi += qi;
        }
        Ok(g)
    }

    pub fn objective(&self, z: &[f64]) -> Result<f64> {
        let qz = crate::linalg::matvec(&self.q_mat, z)?;
        Ok(z.iter()
            .zip(&qz)
            .zip(&self.q)
            .map(|((zi, a), qi)| 0.5 * zi * a + qi * zi)
            .sum())
    }
}

/// `T = (Q − I)⁻¹`, `b = −Tq`.
///
/// With this sign a solution `x` satisfies `Qx⁺ + q = x⁻`, so `x⁺` is a KKT
/// point of the QP with multiplier `x⁻`.
pub fn qp_to_pwls(qp: &QpProblem) -> Result<PwlsProblem> {
    let n = qp.n();
    let shifted = Matrix::Dense(qp.q_mat.combine(1.0, &DenseMatrix::identity(n), -1.0)?);
    let lu = Factorizer::new(&shifted, LuOptions::default())?.factor(None)?;
    let mut inv = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = lu.solve(&e)?;
        e[j] = 0.0;
        for (i, v) in col.into_iter().enumerate() {
            inv.set(i, j, v);
        }
    }
    let tq = crate::linalg::matvec(&inv, &qp.q)?;
    PwlsProblem::new(inv, tq.into_iter().map(|v| -v).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    pub feasible: bool,
    pub max_violation: f64,
}

/// Checks `z ≥ 0`, `Qz + q ≥ 0` and `zᵢ(Qz + q)ᵢ = 0` to
/// `1e-8·(1 + ‖q‖∞)`.
pub fn kkt_check(qp: &QpProblem, z: &[f64]) -> Result<KktReport> {
    check_len(qp.n(), z.len())?;
    let g = qp.gradient(z)?;
    let tol = 1e-8 * (1.0 + norm_inf(&qp.q));
    let max_violation = z
        .iter()
        .zip(&g)
        .map(|(&zi, &gi)| (-zi).max(-gi).max((zi * gi).abs()).max(0.0))
        .fold(0.0, f64::max);
    Ok(KktReport {
        feasible: max_violation <= tol,
        max_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::brute_force_solutions;
    use crate::linalg::SparseMatrix;
    use crate::problem::positive_part;
    use proptest::prelude::*;

    fn dense(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_maps_to_minus_three() {
        let p = PwlsProblem::new(DenseMatrix::identity(2), vec![0.0, 0.0]).unwrap();
        let a = pwls_to_ave(&p);
        assert_eq!(a.t_hat.to_dense(), DenseMatrix::from_diagonal(&[-3.0, -3.0]));
        assert_eq!(a.b_hat, vec![-0.0, -0.0]);
        assert_eq!(brute_force_solutions(&p).unwrap(), vec![vec![0.0, 0.0]]);
        assert_eq!(a.residual(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn sparse_round_trip_keeps_storage() {
        let s = SparseMatrix::from_triplets(3, 3, &[(0, 1, 0.5), (2, 2, 3.0), (1, 0, -0.25)]).unwrap();
        let p = PwlsProblem::new(s, vec![1.0, 2.0, 3.0]).unwrap();
        let a = pwls_to_ave(&p);
        assert_eq!(a.t_hat.storage(), crate::linalg::StorageKind::Sparse);
        let back = ave_to_pwls(&a).unwrap();
        assert_eq!(back.matrix().to_dense(), p.matrix().to_dense());
        assert_eq!(back.rhs(), p.rhs());
    }

    #[test]
    fn solution_carries_over() {
        let p = PwlsProblem::new(dense(&[&[2.0, 0.5], &[0.5, 2.0]]), vec![1.0, -1.0]).unwrap();
        let a = pwls_to_ave(&p);
        for x in brute_force_solutions(&p).unwrap() {
            assert!(norm_inf(&a.residual(&x).unwrap()) <= 1e-10);
        }
    }

    #[test]
    fn qp_one_dimensional() {
        let qp = QpProblem::new(dense(&[&[2.0]]), vec![-1.0]).unwrap();
        let p = qp_to_pwls(&qp).unwrap();
        assert_eq!(p.matrix().to_dense(), dense(&[&[1.0]]));
        assert_eq!(p.rhs(), &[1.0]);
        let sols = brute_force_solutions(&p).unwrap();
        assert_eq!(sols, vec![vec![0.5]]);
        assert!(kkt_check(&qp, &positive_part(&sols[0])).unwrap().feasible);
    }

    #[test]
    fn qp_zero_linear_term() {
        let qp = QpProblem::new(DenseMatrix::from_diagonal(&[2.0, 2.0]), vec![0.0, 0.0]).unwrap();
        let p = qp_to_pwls(&qp).unwrap();
        assert_eq!(p.rhs(), &[0.0, 0.0]);
        assert!(kkt_check(&qp, &[0.0, 0.0]).unwrap().feasible);
    }

    #[test]
    fn qp_singular_shift() {
        let qp = QpProblem::new(DenseMatrix::identity(2), vec![1.0, 1.0]).unwrap();
        assert!(matches!(qp_to_pwls(&qp), Err(Error::SingularMatrix { .. })));
        assert!(QpProblem::new(dense(&[&[1.0, 2.0], &[0.0, 1.0]]), vec![0.0; 2]).is_err());
    }

    #[test]
    fn kkt_examples() {
        let qp = QpProblem::new(dense(&[&[2.0]]), vec![-1.0]).unwrap();
        assert!(kkt_check(&qp, &[0.5]).unwrap().feasible);
        let qp = QpProblem::new(dense(&[&[2.0, 0.0], &[0.0, 1.0]]), vec![1.0, 0.5]).unwrap();
        assert!(kkt_check(&qp, &[0.0, 0.0]).unwrap().feasible);
        let r = kkt_check(&qp, &[-0.1, 0.0]).unwrap();
        assert!(!r.feasible);
        assert!(r.max_violation >= 0.1);
    }

    // Dyadic entries keep −2t − 1 and its inverse exact in binary64.
    fn dyadic() -> impl Strategy<Value = f64> {
        (-4096i32..4096).prop_map(|k| f64::from(k) / 256.0)
    }

    proptest! {
        #[test]
        fn round_trip_is_exact_on_dyadics(
            entries in prop::collection::vec(dyadic(), 16),
            b in prop::collection::vec(-1e3..1e3f64, 4),
        ) {
            let p = PwlsProblem::new(DenseMatrix::new(4, 4, entries).unwrap(), b).unwrap();
            let back = ave_to_pwls(&pwls_to_ave(&p)).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn off_diagonal_and_rhs_round_trip_exactly(
            entries in prop::collection::vec(-1e3..1e3f64, 16),
            b in prop::collection::vec(-1e3..1e3f64, 4),
        ) {
            let p = PwlsProblem::new(DenseMatrix::new(4, 4, entries).unwrap(), b).unwrap();
            let back = ave_to_pwls(&pwls_to_ave(&p)).unwrap();
            let (t0, t1) = (p.matrix().to_dense(), back.matrix().to_dense());
            for i in 0..4 {
                for j in 0..4 {
                    if i == j {
                        let scale = 1.0 + t0.get(i, i).abs();
                        prop_assert!((t0.get(i, i) - t1.get(i, i)).abs() <= 2.0 * f64::EPSILON * scale);
                    } else {
                        prop_assert_eq!(t0.get(i, j), t1.get(i, j));
                    }
                }
            }
            prop_assert_eq!(back.rhs(), p.rhs());
        }
    }
}
