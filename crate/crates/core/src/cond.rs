//! κ and ω condition measures.
//!
//! ω(A) = (tr(A)/n) / det(A)^{1/n}. Every determinant root is evaluated
//! root-first, `∏ fᵢ^{1/n}`, so that matrices such as `0.5·I₅₀` or `2·I₅₀`
//! do not under/overflow the way `(∏ fᵢ)^{1/n}` does.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, lu_pivoted, symmetric_eig, CholeskyDecomp, LUDecomp, SpectralDecomp, SymPDMatrix};

/// `∏ (fᵢ^{exponent})`, each factor rooted before it is multiplied in.
pub fn rooted_product(factors: impl IntoIterator<Item = f64>, exponent: f64) -> f64 {
    factors.into_iter().map(|f| f.powf(exponent)).product()
}

/// κ from an existing spectral decomposition.
pub fn kappa_from_spectrum(eig: &SpectralDecomp) -> Result<f64> {
    let n = eig.order();
    let dmin = eig.min_eigenvalue();
    if !(dmin > 0.0) {
        return Err(Error::NotPositiveDefinite { index: n - 1, value: dmin });
    }
    Ok(eig.max_eigenvalue() / dmin)
}

/// Classical condition number `λ_max / λ_min` from the full eigendecomposition.
pub fn kappa(a: &SymPDMatrix) -> Result<f64> {
    kappa_from_spectrum(&symmetric_eig(a)?)
}

/// ω from a (computed or known) spectrum.
pub fn omega_exact_from_spectrum(d: &[f64]) -> Result<f64> {
    if d.is_empty() {
        return Err(Error::InvalidInput("empty spectrum".into()));
    }
    if let Some((index, &value)) = d.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NonPositiveEigenvalue { index, value });
    }
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    Ok(mean / rooted_product(d.iter().copied(), 1.0 / n))
}

pub fn omega_from_spectral(eig: &SpectralDecomp) -> Result<f64> {
    omega_exact_from_spectrum(&eig.d).map_err(|e| match e {
        Error::NonPositiveEigenvalue { index, value } => Error::NotPositiveDefinite { index, value },
        other => other,
    })
}

/// ω with determinant root `∏ L_ii^{2/n}`.
pub fn omega_from_cholesky(a: &SymPDMatrix, chol: &CholeskyDecomp) -> f64 {
    let n = a.order() as f64;
    (a.trace() / n) / rooted_product(chol.diag(), 2.0 / n)
}

/// ω with determinant root `∏ |U_ii|^{1/n}`.
pub fn omega_from_lu(a: &SymPDMatrix, lu: &LUDecomp) -> f64 {
    let n = a.order() as f64;
    (a.trace() / n) / rooted_product(lu.u.diagonal().into_iter().map(f64::abs), 1.0 / n)
}

/// ω from the eigenvalues of `A`.
pub fn omega_eig(a: &SymPDMatrix) -> Result<f64> {
    omega_from_spectral(&symmetric_eig(a)?)
}

/// ω from the Cholesky factor of `A`.
pub fn omega_chol(a: &SymPDMatrix) -> Result<f64> {
    Ok(omega_from_cholesky(a, &cholesky(a)?))
}

/// ω from the pivoted LU factors of `A`.
pub fn omega_lu(a: &SymPDMatrix) -> Result<f64> {
    Ok(omega_from_lu(a, &lu_pivoted(a.as_matrix())?))
}

/// All condition measures of one matrix with the wall time of each
/// evaluation (factorization included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CondReport {
    pub n: usize,
    pub kappa: f64,
    pub omega_eig: f64,
    #[serde(rename = "omegaR")]
    pub omega_chol: f64,
    #[serde(rename = "omegaLU")]
    pub omega_lu: f64,
    pub t_eig: f64,
    #[serde(rename = "tR")]
    pub t_chol: f64,
    #[serde(rename = "tLU")]
    pub t_lu: f64,
}

impl CondReport {
    pub const CSV_HEADER: &'static str = "n,kappa,omega_eig,omega_R,omega_LU,t_eig,t_R,t_LU";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            self.n, self.kappa, self.omega_eig, self.omega_chol, self.omega_lu, self.t_eig, self.t_chol, self.t_lu
        )
    }
}

pub fn cond_report(a: &SymPDMatrix) -> Result<CondReport> {
    let start = Instant::now();
    let eig = symmetric_eig(a)?;
    let kappa = kappa_from_spectrum(&eig)?;
    let omega_eig = omega_from_spectral(&eig)?;
    let t_eig = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let omega_chol = omega_chol(a)?;
    let t_chol = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let omega_lu = omega_lu(a)?;
    let t_lu = start.elapsed().as_secs_f64();

    Ok(CondReport { n: a.order(), kappa, omega_eig, omega_chol, omega_lu, t_eig, t_chol, t_lu })
}
