//! Matrix-free iterative solvers started from the origin.
//!
//! Both solvers stop once the relative residual `‖b − Ax‖/‖b‖` falls to
//! `tol`, after `max_iter` iterations, or when the iterate stops moving
//! (step below `2⁻⁵²‖x‖` twice in a row, or a breakdown). The residual in
//! the returned [`SolveReport`] is always recomputed from `x`, never taken
//! from the recurrence.

mod cgs;
mod lsqr;
mod operator;

use serde::{Deserialize, Serialize};

pub use cgs::cgs;
pub use lsqr::lsqr;
pub use operator::{LinearOperator, LowRankUpdateOperator, SymmetricFn};

use crate::error::{Error, Result};
use crate::linalg::norm2;

/// Relative step below which an iteration counts as not moving.
pub const STAGNATION_STEP: f64 = f64::EPSILON / 2.0;

/// Absolute threshold for breakdown scalars and steps.
pub const TINY: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { tol: 1e-12, max_iter: 50_000 }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("maxIter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Stagnated,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIter => "MaxIter",
            SolveStatus::Stagnated => "Stagnated",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolveReport {
    pub x: Vec<f64>,
    pub rel_residual: f64,
    pub iterations: usize,
    pub wall_time: f64,
    pub status: SolveStatus,
}

/// `‖b − Ax‖/‖b‖`, or `‖Ax‖` when `b = 0`.
pub fn relative_residual<A: LinearOperator + ?Sized>(a: &A, b: &[f64], x: &[f64]) -> f64 {
    let mut ax = vec![0.0; a.nrows()];
    a.apply(x, &mut ax);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let nb = norm2(b);
    if nb > 0.0 {
        norm2(&r) / nb
    } else {
        norm2(&r)
    }
}

fn check_dims<A: LinearOperator + ?Sized>(a: &A, b: &[f64], square: bool) -> Result<()> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch(format!("b has length {} but A has {} rows", b.len(), a.nrows())));
    }
    if square && a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!("operator is {}x{}; need square", a.nrows(), a.ncols())));
    }
    Ok(())
}

/// Counts consecutive iterations whose step is negligible.
#[derive(Debug, Default)]
struct StallCounter(usize);

impl StallCounter {
    /// Returns true once two consecutive steps were negligible.
    fn record(&mut self, step_norm: f64, x_norm: f64) -> bool {
        if step_norm <= (STAGNATION_STEP * x_norm).max(TINY) {
            self.0 += 1;
        } else {
            self.0 = 0;
        }
        self.0 >= 2
    }
}
