use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

fn check_square(t: &DenseMatrix, b: &[f64]) -> Result<()> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch("triangular factor must be square".into()));
    }
    if b.len() != t.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for order {}",
            b.len(),
            t.rows()
        )));
    }
    Ok(())
}

/// Forward substitution `L x = b`; only the lower triangle of `l` is read.
pub fn solve_lower_triangular(l: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_square(l, b)?;
    let n = l.rows();
    let mut x = b.to_vec();
    for i in 0..n {
        let row = l.row(i);
        let diag = row[i];
        if diag == 0.0 {
            return Err(Error::SingularMatrix { index: i });
        }
        let s: f64 = row[..i].iter().zip(&x[..i]).map(|(a, v)| a * v).sum();
        x[i] = (x[i] - s) / diag;
    }
    Ok(x)
}

/// Back substitution `U x = b`; only the upper triangle of `u` is read.
pub fn solve_upper_triangular(u: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_square(u, b)?;
    let n = u.rows();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let row = u.row(i);
        let diag = row[i];
        if diag == 0.0 {
            return Err(Error::SingularMatrix { index: i });
        }
        let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(a, v)| a * v).sum();
        x[i] = (x[i] - s) / diag;
    }
    Ok(x)
}

/// Back substitution with the transpose of a lower-triangular factor, `Lᵀ x = b`.
pub fn solve_lower_transpose(l: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_square(l, b)?;
    let n = l.rows();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let diag = l.get(i, i);
        if diag == 0.0 {
            return Err(Error::SingularMatrix { index: i });
        }
        x[i] /= diag;
        let xi = x[i];
        for (k, xk) in x[..i].iter_mut().enumerate() {
            *xk -= l.get(i, k) * xi;
        }
    }
    Ok(x)
}
