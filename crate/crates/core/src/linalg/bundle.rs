use std::sync::OnceLock;

use super::{cholesky, lu_pivoted, symmetric_eig, CholeskyDecomp, LUDecomp, SpectralDecomp, SymPDMatrix};
use crate::error::Result;

/// Lazily computed factorizations of one matrix, safe to share across threads.
#[derive(Debug)]
pub struct FactorBundle {
    matrix: SymPDMatrix,
    spectral: OnceLock<Result<SpectralDecomp>>,
    cholesky: OnceLock<Result<CholeskyDecomp>>,
    lu: OnceLock<Result<LUDecomp>>,
}

impl FactorBundle {
    pub fn new(matrix: SymPDMatrix) -> Self {
        FactorBundle { matrix, spectral: OnceLock::new(), cholesky: OnceLock::new(), lu: OnceLock::new() }
    }

    pub fn matrix(&self) -> &SymPDMatrix {
        &self.matrix
    }

    pub fn spectral(&self) -> Result<&SpectralDecomp> {
        self.spectral.get_or_init(|| symmetric_eig(&self.matrix)).as_ref().map_err(Clone::clone)
    }

    pub fn cholesky(&self) -> Result<&CholeskyDecomp> {
        self.cholesky.get_or_init(|| cholesky(&self.matrix)).as_ref().map_err(Clone::clone)
    }

    pub fn lu(&self) -> Result<&LUDecomp> {
        self.lu.get_or_init(|| lu_pivoted(self.matrix.as_matrix())).as_ref().map_err(Clone::clone)
    }
}
