//! Exact evaluation of the ω-condition number (ratio of the arithmetic to the
//! geometric mean of the eigenvalues of a positive definite matrix) and the
//! closed-form ω-optimal preconditioner for low-rank updates
//! `A + U Diag(γ) Uᵀ`.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense matrices, Jacobi eigendecomposition, Cholesky,
//!   pivoted LU, triangular solves and Matrix Market I/O.
//! * [`cond`]: κ and the three ω evaluations.
//! * [`lowrank`]: whitening, optimal γ for rank-one and rank-t updates,
//!   gradient, box projection and KKT certification.
//! * [`scaling`]: optimal diagonal and block-diagonal column scalings.
//! * [`solvers`]: LSQR and CGS driven by a matrix action.
//! * [`experiments`]: random problem generation, the preconditioner
//!   benchmark, perturbation-based condition estimation and performance
//!   profiles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cond;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod lowrank;
pub mod scaling;
pub mod solvers;

pub use cond::{cond_report, kappa, omega_chol, omega_eig, omega_exact_from_spectrum, omega_lu, CondReport};
pub use error::{Error, Result};
pub use linalg::{CholeskyDecomp, DenseMatrix, FactorBundle, LUDecomp, SpectralDecomp, SymPDMatrix};
pub use lowrank::{GammaPolicy, GammaResult, UpdateSpec, Whitening, WhiteningSource};
pub use solvers::{SolveConfig, SolveReport, SolveStatus};
