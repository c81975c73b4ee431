//! Semi-smooth Newton, Jacobi-Newton and Gauss-Seidel-Newton iterations and
//! the driver that runs them.
//!
//! Rows of `T` that are entirely zero reduce to the scalar equation
//! `xᵢ⁺ = bᵢ`. All three steps give such rows an effective diagonal of one,
//! i.e. `xᵢ = bᵢ`, which is the solution branch whenever `bᵢ ≥ 0` and keeps
//! the step systems nonsingular.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{diagonal_solve, forward_substitution_shifted, Factorizer, LuOptions, Matrix, Ordering};
use crate::problem::{sign_pattern, split_dlu, PwlsProblem, SignPattern, SolveOptions, SolveReport, Splitting, Status};
use crate::timing::thread_cpu_time;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "newton")]
    Newton,
    #[serde(rename = "jacobi-newton")]
    JacobiNewton,
    #[serde(rename = "gs-newton")]
    GaussSeidelNewton,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Newton, Method::JacobiNewton, Method::GaussSeidelNewton];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Newton => "newton",
            Method::JacobiNewton => "jacobi-newton",
            Method::GaussSeidelNewton => "gs-newton",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// Step state reused across iterations of one run.
struct Stepper<'a> {
    p: &'a PwlsProblem,
    method: Method,
    empty_rows: Vec<bool>,
    factorizer: Option<Factorizer<'a>>,
    split: Option<Splitting>,
    shift: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(p: &'a PwlsProblem, method: Method) -> Result<Self> {
        let (factorizer, split) = match method {
            Method::Newton => {
                let ordering = match p.matrix() {
                    Matrix::Sparse(_) => Ordering::MinimumDegree,
                    _ => Ordering::Natural,
                };
                let opts = LuOptions {
                    ordering,
                    ..LuOptions::default()
                };
                (Some(Factorizer::new(p.matrix(), opts)?), None)
            }
            _ => (None, Some(split_dlu(p.matrix())?)),
        };
        Ok(Self {
            p,
            method,
            empty_rows: p.matrix().empty_rows(),
            factorizer,
            split,
            shift: vec![0.0; p.n()],
        })
    }

    fn with_split(p: &'a PwlsProblem, method: Method, split: &Splitting) -> Result<Self> {
        check_len(p.n(), split.order())?;
        Ok(Self {
            p,
            method,
            empty_rows: p.matrix().empty_rows(),
            factorizer: None,
            split: Some(split.clone()),
            shift: vec![0.0; p.n()],
        })
    }

    fn step(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.p.n(), x.len())?;
        let b = self.p.rhs();
        match (self.method, &self.split) {
            (Method::Newton, _) => {
                fill_shift(&mut self.shift, &self.empty_rows, x, None);
                let f = self.factorizer.as_ref().expect("newton stepper has a factorizer");
                f.factor(Some(&self.shift))?.solve(b)
            }
            (Method::JacobiNewton, Some(split)) => {
                fill_shift(&mut self.shift, &self.empty_rows, x, Some(&split.diag));
                let lx = split.lower.matvec(x)?;
                let ux = split.upper.matvec(x)?;
                let rhs: Vec<f64> = (0..x.len()).map(|i| b[i] - lx[i] - ux[i]).collect();
                diagonal_solve(&self.shift, &rhs)
            }
            (Method::GaussSeidelNewton, Some(split)) => {
                fill_shift(&mut self.shift, &self.empty_rows, x, Some(&split.diag));
                let ux = split.upper.matvec(x)?;
                let rhs: Vec<f64> = (0..x.len()).map(|i| b[i] - ux[i]).collect();
                forward_substitution_shifted(&split.lower, Some(&self.shift), &rhs)
            }
            (_, None) => unreachable!("splitting stepper has a splitting"),
        }
    }
}

/// The diagonal to add to the step matrix: `sgn(xᵢ⁺)` for Newton,
/// `sgn(xᵢ⁺) + tᵢᵢ` for the splitting methods, one on empty rows.
fn fill_shift(shift: &mut [f64], empty_rows: &[bool], x: &[f64], diag: Option<&[f64]>) {
    for i in 0..x.len() {
        let s = if x[i] > 0.0 { 1.0 } else { 0.0 };
        shift[i] = if empty_rows[i] {
            1.0
        } else {
            s + diag.map_or(0.0, |d| d[i])
        };
    }
}

/// One semi-smooth Newton step: solves `(P(x) + T) y = b`.
pub fn newton_step(p: &PwlsProblem, x: &[f64]) -> Result<Vec<f64>> {
    Stepper::new(p, Method::Newton)?.step(x)
}

/// Solves `(P(x) + D) y = −(L + U) x + b`.
pub fn jacobi_newton_step(p: &PwlsProblem, split: &Splitting, x: &[f64]) -> Result<Vec<f64>> {
    Stepper::with_split(p, Method::JacobiNewton, split)?.step(x)
}

/// Solves `(P(x) + D + L) y = −U x + b` by forward substitution.
pub fn gauss_seidel_newton_step(p: &PwlsProblem, split: &Splitting, x: &[f64]) -> Result<Vec<f64>> {
    Stepper::with_split(p, Method::GaussSeidelNewton, split)?.step(x)
}

/// Runs `method` from `x0` (zero when `None`).
///
/// Failures of the iteration itself (cycles, singular steps, exhausted
/// budget) are reported through [`SolveReport::status`]; `Err` is reserved
/// for invalid input.
pub fn solve(p: &PwlsProblem, method: Method, x0: Option<&[f64]>, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let n = p.n();
    let mut x = match x0 {
        Some(x0) => {
            check_len(n, x0.len())?;
            x0.to_vec()
        }
        None => vec![0.0; n],
    };
    let wall = Instant::now();
    let cpu = thread_cpu_time();
    let mut stepper = Stepper::new(p, method)?;

    let mut residual = p.residual_norm(&x)?;
    let mut history = vec![residual];
    let mut pattern = sign_pattern(&x);
    let mut trace = opts.record_trace.then(|| vec![pattern.clone()]);
    let track_patterns = method == Method::Newton && opts.cycle_detection;
    let mut seen: HashMap<SignPattern, usize> = HashMap::new();
    if track_patterns {
        seen.insert(pattern.clone(), 0);
    }
    let mut certified = false;
    let mut cycle_points = Vec::new();
    let mut iterations = 0;

    let status = if residual <= opts.tolerance {
        Status::Converged
    } else {
        loop {
            if iterations == opts.max_iterations {
                break Status::MaxIterations;
            }
            let next = match stepper.step(&x) {
                Ok(y) => y,
                Err(Error::SingularMatrix { pivot: row }) | Err(Error::ZeroDiagonal(row)) => {
                    break Status::SingularStep {
                        iteration: iterations + 1,
                        row,
                    };
                }
                Err(e) => return Err(e),
            };
            iterations += 1;
            x = next;
            residual = p.residual_norm(&x)?;
            history.push(residual);
            let next_pattern = sign_pattern(&x);
            if method == Method::Newton {
                certified = next_pattern == pattern;
            }
            if let Some(t) = trace.as_mut() {
                t.push(next_pattern.clone());
            }
            if residual <= opts.tolerance {
                break Status::Converged;
            }
            if track_patterns {
                // xᵏ⁺¹ depends on sgn(xᵏ⁺) only, so a repeated pattern repeats
                // the whole tail of the sequence.
                if let Some(&first) = seen.get(&next_pattern) {
                    let lag = iterations - first;
                    if lag == 1 {
                        break Status::Stalled;
                    }
                    cycle_points.push(x.clone());
                    for _ in 1..lag {
                        let last = cycle_points.last().expect("cycle has a first point");
                        cycle_points.push(stepper.step(last)?);
                    }
                    break Status::CycleDetected { length: lag };
                }
                seen.insert(next_pattern.clone(), iterations);
            }
            pattern = next_pattern;
        }
    };

    Ok(SolveReport {
        method,
        status,
        iterations,
        final_residual: residual,
        residual_history: history,
        x,
        certified,
        pattern_trace: trace,
        cycle_points,
        wall_time_s: wall.elapsed().as_secs_f64(),
        cpu_time_s: (thread_cpu_time().saturating_sub(cpu)).as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseMatrix, SparseMatrix};
    use crate::problem::residual;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense(rows: &[&[f64]]) -> Matrix {
        Matrix::Dense(DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap())
    }

    fn problem(rows: &[&[f64]], b: &[f64]) -> PwlsProblem {
        PwlsProblem::new(dense(rows), b.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn spd_3cycle() -> PwlsProblem {
        problem(
            &[&[0.32, -0.26, 0.21], &[-0.26, 0.33, -0.23], &[0.21, -0.23, 0.17]],
            &[0.18, -0.48, 0.30],
        )
    }

    #[test]
    fn newton_step_examples() {
        let p = problem(&[&[2.0]], &[3.0]);
        assert_eq!(newton_step(&p, &[-1.0]).unwrap(), vec![1.5]);
        assert_eq!(newton_step(&p, &[1.5]).unwrap(), vec![1.0]);

        let p = problem(&[&[1.0, 0.0], &[0.0, 1.0]], &[2.0, -1.0]);
        assert_eq!(newton_step(&p, &[1.0, -1.0]).unwrap(), vec![1.0, -1.0]);

        let y = newton_step(&spd_3cycle(), &[319.0 / 1435.0, -1849.0 / 6379.0, 190.0 / 1191.0]).unwrap();
        assert!(
            close(&y, &[-527.0 / 2978.0, -1490.0 / 923.0, -81.0 / 2777.0], 1e-6),
            "{y:?}"
        );
    }

    #[test]
    fn newton_step_on_sparse_matches_dense() {
        let p = spd_3cycle();
        let sparse = PwlsProblem::new(SparseMatrix::from_dense(&p.matrix().to_dense()), p.rhs().to_vec()).unwrap();
        let x = [0.3, -0.2, 0.1];
        assert!(close(
            &newton_step(&p, &x).unwrap(),
            &newton_step(&sparse, &x).unwrap(),
            1e-12
        ));
    }

    #[test]
    fn newton_step_reports_singular_orthant() {
        let p = problem(&[&[-1.0, 0.0], &[0.0, 1.0]], &[1.0, 1.0]);
        assert!(matches!(
            newton_step(&p, &[1.0, 1.0]),
            Err(Error::SingularMatrix { .. })
        ));
        let r = solve(&p, Method::Newton, Some(&[1.0, 1.0]), &SolveOptions::default()).unwrap();
        assert_eq!(r.status, Status::SingularStep { iteration: 1, row: 0 });
    }

    #[test]
    fn splitting_step_examples() {
        let p = problem(&[&[2.0, 0.5], &[0.5, 2.0]], &[1.0, 1.0]);
        let s = split_dlu(p.matrix()).unwrap();
        assert_eq!(jacobi_newton_step(&p, &s, &[0.0, 0.0]).unwrap(), vec![0.5, 0.5]);
        assert_eq!(gauss_seidel_newton_step(&p, &s, &[0.0, 0.0]).unwrap(), vec![0.5, 0.375]);
    }

    #[test]
    fn splitting_steps_reduce_to_newton_on_diagonal() {
        let p = problem(
            &[&[2.0, 0.0, 0.0], &[0.0, -0.5, 0.0], &[0.0, 0.0, -3.0]],
            &[3.0, 1.0, -2.0],
        );
        let s = split_dlu(p.matrix()).unwrap();
        for x in [[-1.0, 1.0, 0.5], [2.0, -4.0, -1.0]] {
            let n = newton_step(&p, &x).unwrap();
            assert_eq!(jacobi_newton_step(&p, &s, &x).unwrap(), n);
            assert_eq!(gauss_seidel_newton_step(&p, &s, &x).unwrap(), n);
        }
    }

    #[test]
    fn steps_fix_a_solution() {
        let p = problem(&[&[2.0, 0.5], &[0.5, 2.0]], &[1.0, 1.0]);
        let r = solve(&p, Method::Newton, None, &SolveOptions::default()).unwrap();
        let s = split_dlu(p.matrix()).unwrap();
        for y in [
            newton_step(&p, &r.x).unwrap(),
            jacobi_newton_step(&p, &s, &r.x).unwrap(),
            gauss_seidel_newton_step(&p, &s, &r.x).unwrap(),
        ] {
            assert!(close(&y, &r.x, 1e-12));
        }
    }

    #[test]
    fn zero_diagonal_is_reported() {
        let p = problem(&[&[0.0, 1.0], &[1.0, 2.0]], &[-1.0, 1.0]);
        let s = split_dlu(p.matrix()).unwrap();
        assert!(matches!(
            jacobi_newton_step(&p, &s, &[-1.0, 0.0]),
            Err(Error::ZeroDiagonal(0))
        ));
        let r = solve(
            &p,
            Method::GaussSeidelNewton,
            Some(&[-1.0, 0.0]),
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(r.status, Status::SingularStep { iteration: 1, row: 0 });
    }

    #[test]
    fn empty_rows_take_closed_form() {
        let p = problem(&[&[0.0, 0.0], &[0.0, 2.0]], &[3.0, 3.0]);
        for m in Method::ALL {
            let r = solve(&p, m, Some(&[-1.0, -1.0]), &SolveOptions::default()).unwrap();
            assert!(r.status.is_converged(), "{m}: {:?}", r.status);
            assert!(close(&r.x, &[3.0, 1.0], 1e-12));
        }
    }

    #[test]
    fn diagonal_converges_in_two() {
        let p = problem(&[&[2.0]], &[3.0]);
        let r = solve(&p, Method::Newton, Some(&[-1.0]), &SolveOptions::default()).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!(r.iterations <= 2);
        assert_eq!(r.x, vec![1.0]);
        assert_eq!(r.residual_history.len(), r.iterations + 1);
        assert!(r.certified);
    }

    #[test]
    fn three_cycle_is_detected() {
        let p = spd_3cycle();
        let x = [81894.0 / 368395.0, -106782.0 / 368395.0, 11754.0 / 73679.0];
        let opts = SolveOptions {
            record_trace: true,
            ..Default::default()
        };
        let r = solve(&p, Method::Newton, Some(&x), &opts).unwrap();
        assert_eq!(r.status, Status::CycleDetected { length: 3 });
        assert_eq!(r.cycle_points.len(), 3);
        assert!(close(&r.cycle_points[2], &[-306.0 / 95.0, 18.0 / 95.0, 6.0], 1e-12));
        let trace = r.pattern_trace.unwrap();
        assert_eq!(trace.first(), trace.last());
    }

    #[test]
    fn two_cycles_of_dominant_example() {
        let p = problem(&[&[-0.26, 0.16], &[0.23, -0.33]], &[-0.12, 0.12]);
        for x0 in [[-498.0 / 2295.0, 582.0 / 2295.0], [102.0 / 245.0, -18.0 / 245.0]] {
            let r = solve(&p, Method::Newton, Some(&x0), &SolveOptions::default()).unwrap();
            assert_eq!(r.status, Status::CycleDetected { length: 2 });
        }
    }

    #[test]
    fn non_newton_ignores_cycle_detection() {
        let p = problem(&[&[-0.26, 0.16], &[0.23, -0.33]], &[-0.12, 0.12]);
        let opts = SolveOptions {
            max_iterations: 50,
            ..Default::default()
        };
        let r = solve(&p, Method::JacobiNewton, None, &opts).unwrap();
        assert_eq!(r.status, Status::MaxIterations);
        assert_eq!(r.iterations, 50);
    }

    #[test]
    fn report_serializes() {
        let p = problem(&[&[2.0]], &[3.0]);
        let r = solve(&p, Method::GaussSeidelNewton, None, &SolveOptions::default()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["method"], "gs-newton");
        assert_eq!(v["status"]["kind"], "converged");
        assert!(v["wall_time_s"].as_f64().unwrap() >= 0.0);
        assert!(v.get("pattern_trace").is_none());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("sor".parse::<Method>().is_err());
    }

    fn random_problem(rng: &mut ChaCha8Rng, n: usize) -> PwlsProblem {
        let data = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        PwlsProblem::new(DenseMatrix::new(n, n, data).unwrap(), b).unwrap()
    }

    #[test]
    fn consecutive_newton_iterates_satisfy_identity() {
        // Fᵢ(xᵏ⁺¹) = (sgn(xᵢᵏ⁺¹)⁺ − sgn(xᵢᵏ)⁺)·xᵢᵏ⁺¹
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..8);
            let p = random_problem(&mut rng, n);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let Ok(y) = newton_step(&p, &x) else { continue };
            let f = residual(&p, &y).unwrap();
            let scale = 1.0 + y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            for i in 0..n {
                let sy = if y[i] > 0.0 { 1.0 } else { 0.0 };
                let sx = if x[i] > 0.0 { 1.0 } else { 0.0 };
                let want = (sy - sx) * y[i];
                assert!(
                    (f[i] - want).abs() <= 1e-10 * scale * (1.0 + p.matrix().max_abs()),
                    "{} vs {}",
                    f[i],
                    want
                );
            }
        }
    }

    proptest! {
        #[test]
        fn certified_indices_have_zero_residual(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..7);
            let p = random_problem(&mut rng, n);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            if let Ok(y) = newton_step(&p, &x) {
                let f = residual(&p, &y).unwrap();
                let scale = 1.0 + y.iter().fold(0.0_f64, |m, v| m.max(v.abs())) * (1.0 + p.matrix().max_abs());
                for i in crate::problem::componentwise_certificate(&p, &x, &y).unwrap() {
                    prop_assert!(f[i].abs() <= 1e-10 * scale);
                }
            }
        }

        #[test]
        fn newton_visits_at_most_2n_patterns(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..6);
            let p = random_problem(&mut rng, n);
            let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let r = solve(&p, Method::Newton, Some(&x0), &SolveOptions::default()).unwrap();
            prop_assert!(r.iterations <= (1 << n) + 1);
            prop_assert_ne!(r.status, Status::MaxIterations);
        }
    }
}
