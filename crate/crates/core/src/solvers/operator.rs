use crate::linalg::{DenseMatrix, SymPDMatrix};

/// A linear map given by its action and the action of its transpose.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y ← A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// `y ← Aᵀ x`
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y)
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.tr_matvec_into(x, y)
    }
}

impl LinearOperator for SymPDMatrix {
    fn nrows(&self) -> usize {
        self.order()
    }

    fn ncols(&self) -> usize {
        self.order()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.as_matrix().matvec_into(x, y)
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.as_matrix().matvec_into(x, y)
    }
}

/// Square symmetric operator from a closure computing `y ← A x`.
pub struct SymmetricFn<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> SymmetricFn<F> {
    pub fn new(n: usize, f: F) -> Self {
        SymmetricFn { n, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for SymmetricFn<F> {
    fn nrows(&self) -> usize {
        self.n
    }

    fn ncols(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

/// `x ↦ (A + εI + U Diag(γ) Uᵀ) x` without forming the matrix.
pub struct LowRankUpdateOperator<'a> {
    a: &'a DenseMatrix,
    epsilon: f64,
    u: &'a DenseMatrix,
    gamma: &'a [f64],
}

impl<'a> LowRankUpdateOperator<'a> {
    /// Panics if the shapes of `A`, `U` and `γ` disagree.
    pub fn new(a: &'a DenseMatrix, epsilon: f64, u: &'a DenseMatrix, gamma: &'a [f64]) -> Self {
        assert!(a.is_square() && u.rows() == a.rows() && gamma.len() == u.cols(), "inconsistent update shapes");
        LowRankUpdateOperator { a, epsilon, u, gamma }
    }
}

impl LinearOperator for LowRankUpdateOperator<'_> {
    fn nrows(&self) -> usize {
        self.a.rows()
    }

    fn ncols(&self) -> usize {
        self.a.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.a.matvec_into(x, y);
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += self.epsilon * xi);
        let mut coeff = vec![0.0; self.u.cols()];
        self.u.tr_matvec_into(x, &mut coeff);
        coeff.iter_mut().zip(self.gamma).for_each(|(c, g)| *c *= g);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += crate::linalg::dot(self.u.row(i), &coeff);
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.apply(x, y)
    }
}
