//! ω-optimal column scalings of a rectangular `A`, i.e. the `D` minimizing
//! ω((AD)ᵀ(AD)) over diagonal or block-diagonal `D`.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, DenseMatrix, SymPDMatrix};

/// A block counts as rank deficient when a squared Cholesky pivot of
/// `AᵢᵀAᵢ` drops below `RANK_TOL` times its largest diagonal entry.
pub const RANK_TOL: f64 = 1e-12;

/// Contiguous column blocks covering `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    ranges: Vec<Range<usize>>,
}

impl BlockPartition {
    pub fn from_ranges(ranges: Vec<Range<usize>>) -> Result<Self> {
        if ranges.is_empty() {
            return Err(Error::InvalidInput("partition has no blocks".into()));
        }
        let mut next = 0;
        for (i, r) in ranges.iter().enumerate() {
            if r.start != next {
                return Err(Error::InvalidInput(format!("block {i} starts at {} instead of {next}", r.start)));
            }
            if r.end <= r.start {
                return Err(Error::InvalidInput(format!("block {i} is empty")));
            }
            next = r.end;
        }
        Ok(BlockPartition { ranges })
    }

    pub fn from_widths(widths: &[usize]) -> Result<Self> {
        let mut start = 0;
        let ranges = widths
            .iter()
            .map(|&w| {
                let r = start..start + w;
                start += w;
                r
            })
            .collect();
        Self::from_ranges(ranges)
    }

    /// One block per column.
    pub fn singletons(n: usize) -> Self {
        BlockPartition { ranges: (0..n).map(|j| j..j + 1).collect() }
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn num_blocks(&self) -> usize {
        self.ranges.len()
    }

    pub fn total_width(&self) -> usize {
        self.ranges.last().map_or(0, |r| r.end)
    }
}

/// Block-diagonal scaling; block `i` acts on the columns of `partition.ranges()[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockScaling {
    pub partition: BlockPartition,
    pub blocks: Vec<DenseMatrix>,
}

impl BlockScaling {
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.partition.total_width();
        let mut d = DenseMatrix::zeros(n, n);
        for (r, block) in self.partition.ranges().iter().zip(&self.blocks) {
            for i in 0..block.rows() {
                for j in 0..block.cols() {
                    d.set(r.start + i, r.start + j, block.get(i, j));
                }
            }
        }
        d
    }

    /// `A D` computed block by block.
    pub fn apply(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        if a.cols() != self.partition.total_width() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} columns but the scaling covers {}",
                a.cols(),
                self.partition.total_width()
            )));
        }
        let mut out = DenseMatrix::zeros(a.rows(), a.cols());
        for (r, block) in self.partition.ranges().iter().zip(&self.blocks) {
            let scaled = a.column_block(r.start, r.end).matmul(block)?;
            for i in 0..a.rows() {
                for j in 0..block.cols() {
                    out.set(i, r.start + j, scaled.get(i, j));
                }
            }
        }
        Ok(out)
    }
}

fn check_tall(a: &DenseMatrix) -> Result<()> {
    if a.rows() < a.cols() {
        return Err(Error::InvalidInput(format!("A is {}x{}; need m >= n", a.rows(), a.cols())));
    }
    Ok(())
}

/// `dᵢ = 1/‖A_{:,i}‖₂`.
pub fn optimal_column_scaling(a: &DenseMatrix) -> Result<Vec<f64>> {
    check_tall(a)?;
    a.column_norms_sq()
        .into_iter()
        .enumerate()
        .map(|(index, s)| if s > 0.0 { Ok(1.0 / s.sqrt()) } else { Err(Error::ZeroColumn { index }) })
        .collect()
}

/// `Dᵢ` = lower Cholesky factor of `(AᵢᵀAᵢ)⁻¹` for each column block `Aᵢ`.
pub fn optimal_block_scaling(a: &DenseMatrix, partition: &BlockPartition) -> Result<BlockScaling> {
    check_tall(a)?;
    if partition.total_width() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} columns but A has {}",
            partition.total_width(),
            a.cols()
        )));
    }
    let blocks = partition
        .ranges()
        .iter()
        .enumerate()
        .map(|(index, r)| {
            let gram = SymPDMatrix::from_symmetrized(a.column_block(r.start, r.end).gram());
            let rank_deficient = |_| Error::RankDeficientBlock { index };
            let chol = cholesky(&gram).map_err(rank_deficient)?;
            let scale = gram.as_matrix().diagonal().into_iter().fold(0.0_f64, f64::max);
            if chol.diag().iter().any(|p| p * p <= RANK_TOL * scale) {
                return Err(Error::RankDeficientBlock { index });
            }
            let inv = chol.inverse().map_err(rank_deficient)?;
            Ok(cholesky(&inv).map_err(rank_deficient)?.l)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockScaling { partition: partition.clone(), blocks })
}

/// `(A Diag(d))ᵀ (A Diag(d))`.
pub fn diagonally_scaled_gram(a: &DenseMatrix, d: &[f64]) -> Result<SymPDMatrix> {
    if d.len() != a.cols() {
        return Err(Error::DimensionMismatch(format!("d has length {} but A has {} columns", d.len(), a.cols())));
    }
    let ad = DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j) * d[j]);
    Ok(SymPDMatrix::from_symmetrized(ad.gram()))
}
