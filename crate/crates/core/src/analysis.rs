//! Solvability tests, the closed form for diagonal `T`, the exhaustive
//! orthant oracle and the fixed-point maps used to cross-check the solvers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{
    dist_inf, forward_substitution_shifted, norm_inf, DenseMatrix, Factorization, Factorizer, LuOptions, Matrix,
    Ordering, Pivoting, RowAccess, SparseMatrix,
};
use crate::problem::{negative_part, sign_pattern, PwlsProblem, SignPattern, Splitting};

/// Largest order accepted by [`brute_force_solutions`].
pub const BRUTE_FORCE_CAP: usize = 20;

/// Largest `2^r` for which [`diagonal_classify`] lists the solutions.
pub const ENUMERATION_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub holds: bool,
    /// `maxᵢ (1 + Σ_{j≠i} |tᵢⱼ|) / |tᵢᵢ|`; infinite when some `tᵢᵢ = 0`.
    #[serde(rename = "ratio")]
    pub worst_row_ratio: f64,
}

/// Per-row `(1 + Σ_{j≠i} |tᵢⱼ|) / |tᵢᵢ|`.
pub fn dominance_ratios(t: &Matrix) -> Vec<f64> {
    (0..t.n_rows())
        .map(|i| {
            let (mut diag, mut off) = (0.0_f64, 0.0);
            t.for_each_in_row(i, |j, v| {
                if j == i {
                    diag = v.abs();
                } else {
                    off += v.abs();
                }
            });
            if diag == 0.0 {
                f64::INFINITY
            } else {
                (1.0 + off) / diag
            }
        })
        .collect()
}

/// Strong diagonal dominance: every row ratio is below one.
pub fn strong_diagonal_dominance(t: &Matrix) -> DominanceReport {
    let worst = dominance_ratios(t).into_iter().fold(0.0, f64::max);
    DominanceReport {
        holds: worst < 1.0,
        worst_row_ratio: worst,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SassenfeldReport {
    pub betas: Vec<f64>,
    pub beta: f64,
    pub holds: bool,
}

/// The strong Sassenfeld coefficients
/// `βᵢ = (Σ_{j<i} |tᵢⱼ| βⱼ + Σ_{j>i} |tᵢⱼ| + 1) / |tᵢᵢ|`.
pub fn sassenfeld(t: &Matrix) -> Result<SassenfeldReport> {
    let n = t.n_rows();
    let mut betas = Vec::with_capacity(n);
    for i in 0..n {
        let (mut diag, mut acc) = (0.0_f64, 1.0);
        t.for_each_in_row(i, |j, v| match j.cmp(&i) {
            std::cmp::Ordering::Less => acc += v.abs() * betas[j],
            std::cmp::Ordering::Equal => diag = v.abs(),
            std::cmp::Ordering::Greater => acc += v.abs(),
        });
        if diag == 0.0 {
            return Err(Error::ZeroDiagonal(i));
        }
        betas.push(acc / diag);
    }
    let beta = betas.iter().copied().fold(0.0, f64::max);
    Ok(SassenfeldReport {
        holds: beta < 1.0,
        betas,
        beta,
    })
}

fn to_sparse(t: &Matrix) -> SparseMatrix {
    match t {
        Matrix::Sparse(s) => s.clone(),
        _ => {
            let mut triplets = Vec::new();
            for i in 0..t.n_rows() {
                t.for_each_in_row(i, |j, v| {
                    if v != 0.0 {
                        triplets.push((i, j, v));
                    }
                });
            }
            SparseMatrix::from_triplets(t.n_rows(), t.n_cols(), &triplets).expect("entries come from a valid matrix")
        }
    }
}

/// Symmetric to `1e-12` relative to the largest entry.
pub fn is_symmetric(t: &Matrix) -> bool {
    if !t.is_square() {
        return false;
    }
    let tol = 1e-12 * t.max_abs();
    let s = to_sparse(t);
    let st = s.transpose();
    // Both sides are compared entrywise, so structurally missing entries count
    // as zeros.
    s.triplets().all(|(i, j, v)| (v - st.get(i, j)).abs() <= tol)
        && st.triplets().all(|(i, j, v)| (v - s.get(i, j)).abs() <= tol)
}

/// Symmetric, and symmetric elimination without row exchanges produces only
/// positive pivots.
pub fn is_spd(t: &Matrix) -> bool {
    if !is_symmetric(t) {
        return false;
    }
    let opts = LuOptions {
        ordering: match t {
            Matrix::Sparse(_) => Ordering::MinimumDegree,
            _ => Ordering::Natural,
        },
        pivoting: Pivoting::Diagonal,
        ..LuOptions::default()
    };
    match Factorizer::new(t, opts).and_then(|f| f.factor(None)) {
        Ok(f) => f.pivots().iter().all(|&p| p > 0.0),
        Err(_) => false,
    }
}

/// Number of eigenvalues of the symmetric matrix `a` below `sigma`, by
/// Sylvester's law of inertia on `LDLᵀ` of `a − σI`.
fn count_below(a: &DenseMatrix, sigma: f64) -> usize {
    let n = a.n_rows();
    let mut w: Vec<f64> = a.as_slice().to_vec();
    for i in 0..n {
        w[i * n + i] -= sigma;
    }
    let scale = f64::EPSILON * (1.0 + a.max_abs() + sigma.abs());
    let mut negative = 0;
    for k in 0..n {
        let mut d = w[k * n + k];
        if d == 0.0 {
            d = -scale;
        }
        if d < 0.0 {
            negative += 1;
        }
        for i in k + 1..n {
            let l = w[i * n + k] / d;
            if l != 0.0 {
                for j in k + 1..=i {
                    w[i * n + j] -= l * w[j * n + k];
                }
            }
        }
    }
    negative
}

/// Smallest eigenvalue of a symmetric matrix, by bisection on the inertia
/// count. Accurate to a few ulps of `max|T|`.
pub fn smallest_eigenvalue(t: &Matrix) -> Result<f64> {
    if !is_symmetric(t) {
        return Err(Error::InvalidMatrix("matrix is not symmetric".into()));
    }
    let a = t.to_dense();
    let n = a.n_rows();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let radius = (0..n)
        .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (-radius - 1.0, radius + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(&a, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NoSolution,
    Solutions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalClassification {
    pub verdict: Verdict,
    /// Indices with `bᵢ > 0` and `tᵢᵢ ∈ (−1, 0)`, each of which doubles the
    /// solution count.
    pub r: usize,
    /// All `2^r` solutions when `2^r ≤ ENUMERATION_CAP`, otherwise empty.
    pub solutions: Vec<Vec<f64>>,
}

/// Solves `xᵢ⁺ + tᵢxᵢ = bᵢ` componentwise for diagonal `T`.
pub fn diagonal_classify(t: &Matrix, b: &[f64]) -> Result<DiagonalClassification> {
    check_len(t.n_rows(), b.len())?;
    let mut off_diagonal = false;
    for i in 0..t.n_rows() {
        t.for_each_in_row(i, |j, v| off_diagonal |= j != i && v != 0.0);
    }
    if off_diagonal || !t.is_square() {
        return Err(Error::NotDiagonal);
    }
    let d = t.diagonal();
    if let Some(i) = d.iter().position(|&v| v == 0.0 || v == -1.0) {
        return Err(Error::InvalidDiagonal(i));
    }

    // Each component has one or two admissible values.
    let mut fixed = vec![0.0; d.len()];
    let mut ambiguous = Vec::new();
    let mut solvable = true;
    for (i, (&ti, &bi)) in d.iter().zip(b).enumerate() {
        let between = ti > -1.0 && ti < 0.0;
        fixed[i] = if between && bi < 0.0 {
            solvable = false;
            f64::NAN
        } else if between && bi > 0.0 {
            ambiguous.push(i);
            bi / (1.0 + ti)
        } else if bi == 0.0 {
            0.0
        } else if (ti > 0.0) == (bi > 0.0) {
            bi / (1.0 + ti)
        } else {
            bi / ti
        };
    }
    let r = ambiguous.len();
    if !solvable {
        return Ok(DiagonalClassification {
            verdict: Verdict::NoSolution,
            r,
            solutions: Vec::new(),
        });
    }
    let mut solutions = Vec::new();
    if r < usize::BITS as usize && (1usize << r) <= ENUMERATION_CAP {
        for mask in 0..1usize << r {
            let mut x = fixed.clone();
            for (k, &i) in ambiguous.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    x[i] = b[i] / d[i];
                }
            }
            solutions.push(x);
        }
    }
    Ok(DiagonalClassification {
        verdict: Verdict::Solutions,
        r,
        solutions,
    })
}

/// Every solution, found by solving `(diag(s) + T) y = b` for each of the
/// `2ⁿ` sign patterns `s` and keeping `y` when its own pattern is `s`.
///
/// Components within rounding of zero are allowed either sign, and each
/// accepted point must also pass a residual check. Points within
/// `1e-9·(1 + ‖b‖∞)` of an earlier one are merged; patterns are visited in
/// increasing binary order.
pub fn brute_force_solutions(p: &PwlsProblem) -> Result<Vec<Vec<f64>>> {
    let n = p.n();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::DimensionTooLarge {
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let factorizer = Factorizer::new(p.matrix(), LuOptions::default())?;
    let b = p.rhs();
    let tol = 1e-9 * (1.0 + norm_inf(b));
    let candidates: Vec<Option<Vec<f64>>> = (0..1u32 << n)
        .into_par_iter()
        .map(|mask| {
            let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let shift = SignPattern::from_bits(&bits).to_diagonal();
            let y = factorizer.factor(Some(&shift)).and_then(|f| f.solve(b)).ok()?;
            let boundary = 1e-12 * (1.0 + norm_inf(&y));
            let consistent = y
                .iter()
                .zip(&bits)
                .all(|(&v, &s)| (v > 0.0) == s || v.abs() <= boundary);
            let ok = consistent && norm_inf(&p.residual(&y).ok()?) <= tol;
            ok.then_some(y)
        })
        .collect();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for y in candidates.into_iter().flatten() {
        if out.iter().all(|z| dist_inf(z, &y) > tol) {
            out.push(y);
        }
    }
    Ok(out)
}

/// `Φ(x) = (T + I)⁻¹ (b − x⁻)`, with `T + I` factored once.
pub struct PhiMap<'a> {
    p: &'a PwlsProblem,
    factorization: Factorization,
}

impl<'a> PhiMap<'a> {
    pub fn new(p: &'a PwlsProblem) -> Result<Self> {
        let shift = vec![1.0; p.n()];
        let factorization = Factorizer::new(p.matrix(), LuOptions::default())?.factor(Some(&shift))?;
        Ok(Self { p, factorization })
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.p.n(), x.len())?;
        let rhs: Vec<f64> = self.p.rhs().iter().zip(negative_part(x)).map(|(b, m)| b - m).collect();
        self.factorization.solve(&rhs)
    }
}

pub fn phi_map(p: &PwlsProblem, x: &[f64]) -> Result<Vec<f64>> {
    PhiMap::new(p)?.apply(x)
}

/// `ψ(x) = (D + L)⁻¹ (−Ux + b − x⁺)`.
pub fn psi_map(p: &PwlsProblem, split: &Splitting, x: &[f64]) -> Result<Vec<f64>> {
    check_len(p.n(), x.len())?;
    check_len(p.n(), split.order())?;
    let ux = split.upper.matvec(x)?;
    let rhs: Vec<f64> = (0..x.len()).map(|i| p.rhs()[i] - ux[i] - x[i].max(0.0)).collect();
    forward_substitution_shifted(&split.lower, Some(&split.diag), &rhs)
}

/// Largest `‖(P(xₖ) + T) xₖ₊₁ − b‖∞` around the closed sequence of points.
pub fn cycle_residual(points: &[Vec<f64>], p: &PwlsProblem) -> Result<f64> {
    let m = points.len();
    let mut worst = 0.0_f64;
    for k in 0..m {
        let (x, y) = (&points[k], &points[(k + 1) % m]);
        check_len(p.n(), x.len())?;
        let s = sign_pattern(x);
        let ty = p.matrix().matvec(y)?;
        for i in 0..p.n() {
            let lhs = ty[i] + if s.get(i) { y[i] } else { 0.0 };
            worst = worst.max((lhs - p.rhs()[i]).abs());
        }
    }
    Ok(worst)
}

/// True when each point is the Newton image of its predecessor, cyclically,
/// to `1e-9·(1 + ‖b‖∞)`.
pub fn check_cycle(points: &[Vec<f64>], p: &PwlsProblem) -> bool {
    points.len() >= 2 && cycle_residual(points, p).is_ok_and(|r| r <= 1e-9 * (1.0 + norm_inf(p.rhs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use crate::problem::split_dlu;
    use proptest::prelude::*;

    fn dense(rows: &[&[f64]]) -> Matrix {
        Matrix::Dense(DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap())
    }

    fn spd_3cycle() -> PwlsProblem {
        PwlsProblem::new(
            dense(&[&[0.32, -0.26, 0.21], &[-0.26, 0.33, -0.23], &[0.21, -0.23, 0.17]]),
            vec![0.18, -0.48, 0.30],
        )
        .unwrap()
    }

    fn diag(t: &[f64], b: &[f64]) -> PwlsProblem {
        PwlsProblem::new(SparseMatrix::from_diagonal(t), b.to_vec()).unwrap()
    }

    #[test]
    fn dominance_examples() {
        let r = strong_diagonal_dominance(spd_3cycle().matrix());
        assert!(!r.holds);
        assert!((dominance_ratios(spd_3cycle().matrix())[0] - 4.59375).abs() < 1e-12);
        let id = Matrix::Dense(DenseMatrix::identity(3));
        let r = strong_diagonal_dominance(&id);
        assert_eq!(r.worst_row_ratio, 1.0);
        assert!(!r.holds);
        let z = dense(&[&[0.0, 1.0], &[1.0, 5.0]]);
        assert_eq!(strong_diagonal_dominance(&z).worst_row_ratio, f64::INFINITY);
        let g = dense(&[&[2.501, 0.5, -1.0], &[0.2, 1.201, 0.0], &[0.0, 0.0, 1.001]]);
        let r = strong_diagonal_dominance(&g);
        assert!(r.holds);
        assert!((r.worst_row_ratio - 2.5 / 2.501).abs() < 1e-15);
    }

    #[test]
    fn sassenfeld_examples() {
        let r = sassenfeld(&dense(&[&[2.0, 0.0], &[0.0, 4.0]])).unwrap();
        assert_eq!(r.betas, vec![0.5, 0.25]);
        assert!(r.holds);
        let r = sassenfeld(&dense(&[&[2.0, 0.5], &[0.5, 2.0]])).unwrap();
        assert_eq!(r.betas, vec![0.75, 0.6875]);
        assert_eq!(r.beta, 0.75);
        assert!(matches!(
            sassenfeld(&dense(&[&[1.0, 0.0], &[1.0, 0.0]])),
            Err(Error::ZeroDiagonal(1))
        ));
    }

    #[test]
    fn sassenfeld_without_dominance() {
        // Row 2 ratio (1 + 2)/3 = 1, but β₂ = (2·0.2 + 1)/3 < 1.
        let t = dense(&[&[10.0, 0.0, 1.0], &[2.0, 3.0, 0.0], &[0.0, 0.1, 2.0]]);
        assert!(!strong_diagonal_dominance(&t).holds);
        assert!(sassenfeld(&t).unwrap().holds);
    }

    #[test]
    fn spd_examples() {
        assert!(is_spd(spd_3cycle().matrix()));
        assert!(!is_spd(&Matrix::Dense(DenseMatrix::from_diagonal(&[-1.0, -1.0]))));
        assert!(!is_spd(&dense(&[&[2.0, 1.0], &[3.0, 4.0]])));
        assert!(!is_spd(&dense(&[&[1.0, 2.0], &[2.0, 1.0]])));
        let s = Matrix::Sparse(SparseMatrix::from_dense(&spd_3cycle().matrix().to_dense()));
        assert!(is_spd(&s));
    }

    #[test]
    fn smallest_eigenvalue_examples() {
        let l = smallest_eigenvalue(&dense(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert!((l - 1.0).abs() < 1e-14);
        let l = smallest_eigenvalue(spd_3cycle().matrix()).unwrap();
        assert!(l > 0.0 && l < 0.01);
        assert!(smallest_eigenvalue(&dense(&[&[2.0, 1.0], &[3.0, 4.0]])).is_err());
    }

    #[test]
    fn diagonal_examples() {
        let t = Matrix::Sparse(SparseMatrix::from_diagonal(&[-0.5]));
        let c = diagonal_classify(&t, &[1.0]).unwrap();
        assert_eq!(c.verdict, Verdict::Solutions);
        assert_eq!(c.r, 1);
        assert_eq!(c.solutions, vec![vec![2.0], vec![-2.0]]);
        assert_eq!(diagonal_classify(&t, &[-1.0]).unwrap().verdict, Verdict::NoSolution);
        let t = Matrix::Sparse(SparseMatrix::from_diagonal(&[2.0]));
        assert_eq!(diagonal_classify(&t, &[3.0]).unwrap().solutions, vec![vec![1.0]]);
        let t = Matrix::Sparse(SparseMatrix::from_diagonal(&[1.0, -1.0]));
        assert!(matches!(
            diagonal_classify(&t, &[1.0, 1.0]),
            Err(Error::InvalidDiagonal(1))
        ));
        assert!(matches!(
            diagonal_classify(&dense(&[&[1.0, 1.0], &[0.0, 1.0]]), &[1.0, 1.0]),
            Err(Error::NotDiagonal)
        ));
    }

    #[test]
    fn brute_force_examples() {
        let sols = brute_force_solutions(&diag(&[-0.5], &[1.0])).unwrap();
        assert_eq!(sols, vec![vec![-2.0], vec![2.0]]);
        let p = PwlsProblem::new(dense(&[&[-0.26, 0.16], &[0.23, -0.33]]), vec![-0.12, 0.12]).unwrap();
        assert!(brute_force_solutions(&p).unwrap().is_empty());
        assert_eq!(brute_force_solutions(&spd_3cycle()).unwrap().len(), 1);
        let big = diag(&[1.0; 21], &[0.0; 21]);
        assert!(matches!(
            brute_force_solutions(&big),
            Err(Error::DimensionTooLarge { n: 21, cap: 20 })
        ));
    }

    #[test]
    fn brute_force_keeps_boundary_solutions() {
        let sols = brute_force_solutions(&diag(&[2.0, -0.5], &[0.0, 1.0])).unwrap();
        assert_eq!(sols.len(), 2);
        assert!(sols.iter().all(|x| x[0] == 0.0));
    }

    #[test]
    fn phi_examples() {
        let p = PwlsProblem::new(Matrix::Dense(DenseMatrix::identity(2)), vec![2.0, -1.0]).unwrap();
        assert_eq!(phi_map(&p, &[1.0, -1.0]).unwrap(), vec![1.0, -1.0]);
        assert_eq!(phi_map(&p, &[5.0, 0.0]).unwrap(), vec![1.0, -0.5]);
        assert_eq!(phi_map(&p, &[0.5, 3.0]).unwrap(), vec![1.0, -0.5]);
    }

    #[test]
    fn phi_iteration_reaches_the_solution() {
        let p = spd_3cycle();
        let want = &brute_force_solutions(&p).unwrap()[0];
        let phi = PhiMap::new(&p).unwrap();
        let mut x = vec![0.0; 3];
        for _ in 0..5000 {
            x = phi.apply(&x).unwrap();
        }
        assert!(dist_inf(&x, want) < 1e-8);
    }

    #[test]
    fn psi_examples() {
        let p = diag(&[2.0, 4.0], &[3.0, -1.0]);
        let s = split_dlu(p.matrix()).unwrap();
        let x = [1.0, -2.0];
        assert_eq!(psi_map(&p, &s, &x).unwrap(), vec![1.0, -0.25]);
        let sol = [1.0, -0.25];
        assert_eq!(psi_map(&p, &s, &sol).unwrap(), sol.to_vec());
    }

    #[test]
    fn cycle_examples() {
        let p = spd_3cycle();
        let pts = vec![
            vec![81894.0 / 368395.0, -106782.0 / 368395.0, 11754.0 / 73679.0],
            vec![-21902.0 / 123765.0, -66598.0 / 41255.0, -722.0 / 24753.0],
            vec![-306.0 / 95.0, 18.0 / 95.0, 6.0],
        ];
        assert!(check_cycle(&pts, &p));
        assert!(cycle_residual(&pts, &p).unwrap() <= 1e-12);
        let sol = brute_force_solutions(&p).unwrap().remove(0);
        assert!(check_cycle(&[sol.clone(), sol.clone(), sol], &p));
        assert!(!check_cycle(&pts[..1], &p));
        assert!(!check_cycle(&[pts[0].clone(), pts[2].clone(), pts[1].clone()], &p));
    }

    proptest! {
        #[test]
        fn dominance_implies_sassenfeld(entries in prop::collection::vec(-1.0..1.0f64, 25), bump in 0.0..2.0f64) {
            let mut d = DenseMatrix::new(5, 5, entries).unwrap();
            for i in 0..5 {
                let off: f64 = (0..5).filter(|&j| j != i).map(|j| d.get(i, j).abs()).sum();
                d.set(i, i, 1.0 + off + bump * 0.5 - 0.4);
            }
            let t = Matrix::Dense(d);
            if strong_diagonal_dominance(&t).holds {
                let s = sassenfeld(&t).unwrap();
                prop_assert!(s.holds);
            }
        }

        #[test]
        fn phi_contracts_by_the_smallest_eigenvalue(
            m in prop::collection::vec(-1.0..1.0f64, 16),
            ridge in 0.01..1.0f64,
            x in prop::collection::vec(-5.0..5.0f64, 4),
            y in prop::collection::vec(-5.0..5.0f64, 4),
        ) {
            let m = DenseMatrix::new(4, 4, m).unwrap();
            let mut t = m.matmul(&m.transpose()).unwrap();
            for i in 0..4 {
                t.set(i, i, t.get(i, i) + ridge);
            }
            let p = PwlsProblem::new(t, vec![0.5, -0.5, 1.0, 0.0]).unwrap();
            let lambda = smallest_eigenvalue(p.matrix()).unwrap();
            let phi = PhiMap::new(&p).unwrap();
            let d: Vec<f64> = phi.apply(&x).unwrap().iter().zip(phi.apply(&y).unwrap()).map(|(a, b)| a - b).collect();
            let gap: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            prop_assume!(norm2(&gap) > 1e-9);
            prop_assert!(norm2(&d) / norm2(&gap) <= 1.0 / (lambda + 1.0) + 1e-10);
        }

        #[test]
        fn diagonal_matches_brute_force(
            t in prop::collection::vec(-3.0..3.0f64, 1..7),
            seed in prop::collection::vec(-2.0..2.0f64, 7),
        ) {
            prop_assume!(t.iter().all(|&v| v.abs() > 0.05 && (v + 1.0).abs() > 0.05));
            let b = &seed[..t.len()];
            let p = diag(&t, b);
            let c = diagonal_classify(p.matrix(), b).unwrap();
            let mut brute = brute_force_solutions(&p).unwrap();
            let mut listed = c.solutions.clone();
            let lex = |x: &Vec<f64>, y: &Vec<f64>| {
                x.iter().zip(y).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
            };
            brute.sort_by(lex);
            listed.sort_by(lex);
            prop_assert_eq!(brute.len(), listed.len());
            for (x, y) in brute.iter().zip(&listed) {
                prop_assert!(dist_inf(x, y) <= 1e-12 * (1.0 + norm_inf(b)));
            }
        }
    }
}
