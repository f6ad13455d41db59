//! Dense linear-algebra substrate.

mod bundle;
mod cholesky;
mod eig;
mod lu;
mod matrix;
pub mod mm;
mod triangular;

pub use bundle::FactorBundle;
pub use cholesky::{cholesky, CholeskyDecomp};
pub use eig::{symmetric_eig, SpectralDecomp, MAX_SWEEPS, OFF_DIAG_TOL};
pub use lu::{lu_pivoted, LUDecomp, PIVOT_TOL};
pub use matrix::{axpy, dot, norm2, DenseMatrix, SymPDMatrix, SYM_TOL};
pub use triangular::{solve_lower_transpose, solve_lower_triangular, solve_upper_triangular};
