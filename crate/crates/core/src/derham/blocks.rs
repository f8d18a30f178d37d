use num_complex::Complex64;

use crate::linalg::{self, CMatrix};

/// A block-diagonal matrix, one block per Fourier mode.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDiagonal {
    blocks: Vec<CMatrix>,
}

impl BlockDiagonal {
    pub fn new(blocks: Vec<CMatrix>) -> Self {
        BlockDiagonal { blocks }
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    pub fn nrows(&self) -> usize {
        self.blocks.iter().map(CMatrix::nrows).sum()
    }

    pub fn ncols(&self) -> usize {
        self.blocks.iter().map(CMatrix::ncols).sum()
    }

    pub fn adjoint(&self) -> Self {
        BlockDiagonal { blocks: self.blocks.iter().map(CMatrix::adjoint).collect() }
    }

    pub fn mul(&self, rhs: &BlockDiagonal) -> Self {
        assert_eq!(self.blocks.len(), rhs.blocks.len(), "block counts differ");
        BlockDiagonal { blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a * b).collect() }
    }

    pub fn add(&self, rhs: &BlockDiagonal) -> Self {
        assert_eq!(self.blocks.len(), rhs.blocks.len(), "block counts differ");
        BlockDiagonal { blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a + b).collect() }
    }

    /// Largest singular value over all blocks.
    pub fn op_norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.blocks.iter().map(CMatrix::norm_squared).sum::<f64>().sqrt()
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.nrows());
        let mut offset = 0;
        for b in &self.blocks {
            let seg = linalg::CVector::from_column_slice(&x[offset..offset + b.ncols()]);
            out.extend((b * seg).iter().copied());
            offset += b.ncols();
        }
        out
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.nrows(), self.ncols());
        let (mut r, mut c) = (0, 0);
        for b in &self.blocks {
            out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
            r += b.nrows();
            c += b.ncols();
        }
        out
    }
}
