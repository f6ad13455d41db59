use super::matrix::DenseMatrix;
use super::triangular::{solve_lower_triangular, solve_upper_triangular};
use crate::error::{Error, Result};

/// Relative pivot threshold, scaled by `‖A‖_max`.
pub const PIVOT_TOL: f64 = 1e-14;

/// Row-pivoted `P A = L U`. `perm[i]` is the row of `A` that ends up in row `i`.
#[derive(Clone, Debug)]
pub struct LUDecomp {
    pub perm: Vec<usize>,
    pub l: DenseMatrix,
    pub u: DenseMatrix,
}

impl LUDecomp {
    pub fn order(&self) -> usize {
        self.perm.len()
    }

    /// `P A`, i.e. `A` with rows reordered by `perm`.
    pub fn permute_rows(&self, a: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(self.perm[i], j))
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.order() {
            return Err(Error::DimensionMismatch("right-hand side length".into()));
        }
        let pb: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        let y = solve_lower_triangular(&self.l, &pb)?;
        solve_upper_triangular(&self.u, &y)
    }
}

/// Gaussian elimination with partial pivoting by largest `|pivot|`.
pub fn lu_pivoted(a: &DenseMatrix) -> Result<LUDecomp> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("LU needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    let threshold = PIVOT_TOL * a.max_abs();
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let (piv_row, piv_abs) = (k..n)
            .map(|i| (i, w.get(i, k).abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_abs <= threshold || piv_abs == 0.0 {
            return Err(Error::SingularMatrix { index: k });
        }
        if piv_row != k {
            perm.swap(k, piv_row);
            let data = w.as_mut_slice();
            for j in 0..n {
                data.swap(k * n + j, piv_row * n + j);
            }
        }
        let pivot = w.get(k, k);
        let data = w.as_mut_slice();
        for i in (k + 1)..n {
            let factor = data[i * n + k] / pivot;
            data[i * n + k] = factor;
            if factor == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                data[i * n + j] -= factor * data[k * n + j];
            }
        }
    }

    let l = DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => w.get(i, j),
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Less => 0.0,
    });
    let u = DenseMatrix::from_fn(n, n, |i, j| if i <= j { w.get(i, j) } else { 0.0 });
    Ok(LUDecomp { perm, l, u })
}
