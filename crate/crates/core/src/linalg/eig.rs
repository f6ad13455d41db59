use super::matrix::{DenseMatrix, SymPDMatrix};
use crate::error::{Error, Result};

/// Sweep limit for the cyclic Jacobi method.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal threshold, relative to `‖A‖_F`.
pub const OFF_DIAG_TOL: f64 = 1e-14;

/// `A = Q Diag(d) Qᵀ` with eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct SpectralDecomp {
    pub q: DenseMatrix,
    pub d: Vec<f64>,
}

impl SpectralDecomp {
    pub fn order(&self) -> usize {
        self.d.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.d[0]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.d[self.d.len() - 1]
    }

    /// `Q Diag(d) Qᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.order();
        let qd = DenseMatrix::from_fn(n, n, |i, j| self.q.get(i, j) * self.d[j]);
        qd.matmul(&self.q.transpose()).expect("square factors")
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps over all `(p, q)` pairs until every off-diagonal entry is below
/// `1e-14·‖A‖_F`.
pub fn symmetric_eig(a: &SymPDMatrix) -> Result<SpectralDecomp> {
    let n = a.order();
    let mut m = a.as_matrix().as_slice().to_vec();
    let mut v = DenseMatrix::identity(n).as_slice().to_vec();
    let tol = OFF_DIAG_TOL * a.as_matrix().frobenius_norm();

    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        let max_off = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .fold(0.0_f64, |acc, (p, q)| acc.max(m[p * n + q].abs()));
        if max_off <= tol {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                } else {
                    0.0
                };
                if t == 0.0 {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    m[k * n + p] = new_kp;
                    m[p * n + k] = new_kp;
                    m[k * n + q] = new_kq;
                    m[q * n + k] = new_kq;
                }
                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));
    let d = order.iter().map(|&i| m[i * n + i]).collect();
    let q = DenseMatrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
    Ok(SpectralDecomp { q, d })
}
