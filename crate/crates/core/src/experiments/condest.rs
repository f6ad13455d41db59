//! Perturbation study of `Ax = b`: how far does `x` move, relative to the
//! size of random perturbations of `A` and `b`?
//!
//! Each trial solves `(A + εΔA)(x + Δx) = b + εΔb` directly and records
//! `(‖Δx‖/‖x‖) / (ρ_A + ρ_b)` with `ρ_A = ε‖ΔA‖_F/‖A‖_F` and
//! `ρ_b = ε‖Δb‖/‖b‖`. To first order this ratio never exceeds κ(A).

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::random::{gaussian_matrix, gaussian_vector};
use crate::cond::{kappa_from_spectrum, omega_from_spectral};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, norm2, symmetric_eig, DenseMatrix, SymPDMatrix};

pub const DEFAULT_TRIALS: usize = 30;
pub const DEFAULT_EPSILON: f64 = 1e-8;

const MAX_DISCARDS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CondEstimateStudy {
    pub n: usize,
    pub trials: usize,
    pub epsilon: f64,
    pub kappa: f64,
    pub omega: f64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub median_ratio: f64,
    /// Perturbed matrices that were not positive definite and were redrawn.
    pub discarded: usize,
}

impl CondEstimateStudy {
    pub const CSV_HEADER: &'static str = "n,trials,epsilon,kappa,omega,maxRatio,meanRatio,medianRatio,discarded";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
            self.n,
            self.trials,
            self.epsilon,
            self.kappa,
            self.omega,
            self.max_ratio,
            self.mean_ratio,
            self.median_ratio,
            self.discarded
        )
    }

    pub fn write_csv_path(path: impl AsRef<Path>, studies: &[CondEstimateStudy]) -> Result<()> {
        let mut text = format!("{}\n", Self::CSV_HEADER);
        for s in studies {
            text.push_str(&s.to_csv_row());
            text.push('\n');
        }
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Ratio for one perturbation; `x` must solve `Ax = b`. `da = None` perturbs `b` only.
pub fn perturbation_ratio(
    a: &SymPDMatrix,
    b: &[f64],
    x: &[f64],
    da: Option<&DenseMatrix>,
    db: &[f64],
    epsilon: f64,
) -> Result<f64> {
    let (perturbed, rho_a) = match da {
        Some(da) => {
            let m = DenseMatrix::from_fn(a.order(), a.order(), |i, j| a.get(i, j) + epsilon * da.get(i, j));
            (SymPDMatrix::from_symmetrized(m), epsilon * da.frobenius_norm() / a.as_matrix().frobenius_norm())
        }
        None => (a.clone(), 0.0),
    };
    let rhs: Vec<f64> = b.iter().zip(db).map(|(bi, di)| bi + epsilon * di).collect();
    let x_new = cholesky(&perturbed)?.solve(&rhs)?;
    let dx: Vec<f64> = x_new.iter().zip(x).map(|(a, b)| a - b).collect();
    let rho_b = epsilon * norm2(db) / norm2(b);
    Ok((norm2(&dx) / norm2(x)) / (rho_a + rho_b))
}

/// Runs `trials` random perturbations of `A` and `b`.
pub fn estimate_cond<R: Rng + ?Sized>(
    a: &SymPDMatrix,
    b: &[f64],
    trials: usize,
    epsilon: f64,
    rng: &mut R,
) -> Result<CondEstimateStudy> {
    let n = a.order();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!("b has length {} but A has order {n}", b.len())));
    }
    if norm2(b) == 0.0 {
        return Err(Error::InvalidInput("b must be nonzero".into()));
    }
    if trials == 0 || !(epsilon > 0.0) {
        return Err(Error::InvalidInput("need at least one trial and a positive epsilon".into()));
    }
    let eig = symmetric_eig(a)?;
    let kappa = kappa_from_spectrum(&eig)?;
    let omega = omega_from_spectral(&eig)?;
    let x = cholesky(a)?.solve(b)?;

    let mut ratios = Vec::with_capacity(trials);
    let mut discarded = 0;
    while ratios.len() < trials {
        let g = gaussian_matrix(n, n, rng);
        let da = DenseMatrix::from_fn(n, n, |i, j| 0.5 * (g.get(i, j) + g.get(j, i)));
        let db = gaussian_vector(n, rng);
        match perturbation_ratio(a, b, &x, Some(&da), &db, epsilon) {
            Ok(r) => ratios.push(r),
            Err(Error::NotPositiveDefinite { .. }) => {
                discarded += 1;
                if discarded == MAX_DISCARDS {
                    return Err(Error::InvalidInput(format!(
                        "{MAX_DISCARDS} perturbations lost positive definiteness; epsilon too large"
                    )));
                }
            }
            Err(e) => return Err(e),
        }
    }

    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let median_ratio = if trials % 2 == 1 {
        sorted[trials / 2]
    } else {
        0.5 * (sorted[trials / 2 - 1] + sorted[trials / 2])
    };
    Ok(CondEstimateStudy {
        n,
        trials,
        epsilon,
        kappa,
        omega,
        max_ratio: sorted[trials - 1],
        mean_ratio: ratios.iter().sum::<f64>() / trials as f64,
        median_ratio,
        ratios,
        discarded,
    })
}
