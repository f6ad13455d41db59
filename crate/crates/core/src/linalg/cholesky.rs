use super::matrix::{DenseMatrix, SymPDMatrix};
use super::triangular::{solve_lower_transpose, solve_lower_triangular};
use crate::error::{Error, Result};

/// `A = L Lᵀ` with `L` lower triangular and `L_ii > 0`.
#[derive(Clone, Debug)]
pub struct CholeskyDecomp {
    pub l: DenseMatrix,
}

impl CholeskyDecomp {
    pub fn order(&self) -> usize {
        self.l.rows()
    }

    pub fn diag(&self) -> Vec<f64> {
        self.l.diagonal()
    }

    /// Solves `A x = b` by two triangular solves.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let y = solve_lower_triangular(&self.l, b)?;
        solve_lower_transpose(&self.l, &y)
    }

    /// `A⁻¹`, symmetrized.
    pub fn inverse(&self) -> Result<SymPDMatrix> {
        let n = self.order();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            cols.push(self.solve(&e)?);
        }
        Ok(SymPDMatrix::from_symmetrized(DenseMatrix::from_columns(&cols)?))
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.l.matmul(&self.l.transpose()).expect("square factor")
    }
}

/// Cholesky factorization. Fails on the first pivot that is not strictly
/// positive (or not finite).
pub fn cholesky(a: &SymPDMatrix) -> Result<CholeskyDecomp> {
    let n = a.order();
    let src = a.as_matrix();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let lj = l.row(j);
        let s: f64 = lj[..j].iter().map(|v| v * v).sum();
        let pivot = src.get(j, j) - s;
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { index: j, value: pivot });
        }
        let ljj = pivot.sqrt();
        l.set(j, j, ljj);
        for i in (j + 1)..n {
            let s: f64 = {
                let (li, lj) = (l.row(i), l.row(j));
                li[..j].iter().zip(&lj[..j]).map(|(x, y)| x * y).sum()
            };
            l.set(i, j, (src.get(i, j) - s) / ljj);
        }
    }
    Ok(CholeskyDecomp { l })
}
