//! Solvers for the piecewise linear system `x⁺ + Tx = b`, where `x⁺` is the
//! componentwise positive part of `x`.
//!
//! Three iterations are provided: semi-smooth Newton, which solves
//! `(P(x) + T) y = b` with `P(x) = diag(sgn(x⁺))`, and its Jacobi and
//! Gauss-Seidel variants, which only invert the diagonal or lower-triangular
//! part of that system. Around them sit solvability tests, the exhaustive
//! orthant oracle, transforms to absolute value equations and
//! nonnegativity-constrained QPs, random instance generators, a benchmark
//! harness and a groundwater flow application.
//!
//! ```
//! use pwls::{solve, DenseMatrix, Method, PwlsProblem, SolveOptions};
//!
//! let t = DenseMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 2.0]]).unwrap();
//! let p = PwlsProblem::new(t, vec![1.0, -1.0]).unwrap();
//! let report = solve(&p, Method::Newton, None, &SolveOptions::default()).unwrap();
//! assert!(report.status.is_converged());
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod bench;
pub mod boussinesq;
pub mod error;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod problem;
pub mod solvers;
pub mod timing;
pub mod transforms;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, Matrix, PentaBandMatrix, SparseMatrix, StorageKind};
pub use problem::{
    componentwise_certificate, negative_part, positive_part, residual, sign_pattern, split_dlu, PwlsProblem,
    SignPattern, SolveOptions, SolveReport, Splitting, Status,
};
pub use solvers::{gauss_seidel_newton_step, jacobi_newton_step, newton_step, solve, Method};
