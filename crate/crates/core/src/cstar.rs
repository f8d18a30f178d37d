//! The truncated C*-algebra `A_N = End(H_N)`.
//!
//! `H_N` is spanned by the first `N` Hermite functions in each of `n` degrees
//! of freedom; a vector carries `N^n` coefficients in the tensor-product
//! basis. The scalar product is conjugate-linear in the first slot.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// Shape of the truncated oscillator space: `n_dof` factors of size `cutoff`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HermiteSpace {
    pub n_dof: usize,
    pub cutoff: usize,
}

impl HermiteSpace {
    pub fn new(n_dof: usize, cutoff: usize) -> Self {
        HermiteSpace { n_dof, cutoff }
    }

    pub fn dim(&self) -> usize {
        self.cutoff.pow(self.n_dof as u32)
    }

    /// Per-degree-of-freedom Hermite indices of a flat index (first dof most significant).
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_dof];
        let mut rest = flat;
        for slot in out.iter_mut().rev() {
            *slot = rest % self.cutoff;
            rest /= self.cutoff;
        }
        out
    }

    /// Flat indices whose every Hermite index is at most `cutoff - 1 - margin`.
    pub fn interior(&self, margin: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&f| self.multi_index(f).iter().all(|&j| j + margin < self.cutoff))
            .collect()
    }
}

/// A vector of `H_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct HVector {
    space: HermiteSpace,
    coeffs: CVector,
}

impl HVector {
    pub fn new(space: HermiteSpace, coeffs: CVector) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: coeffs.len() });
        }
        Ok(HVector { space, coeffs })
    }

    pub fn zero(space: HermiteSpace) -> Self {
        HVector { space, coeffs: CVector::zeros(space.dim()) }
    }

    /// The `j`-th tensor-product Hermite basis vector (flat index).
    pub fn basis(space: HermiteSpace, j: usize) -> Self {
        let mut coeffs = CVector::zeros(space.dim());
        coeffs[j] = linalg::ONE;
        HVector { space, coeffs }
    }

    pub fn space(&self) -> HermiteSpace {
        self.space
    }

    pub fn coeffs(&self) -> &CVector {
        &self.coeffs
    }

    /// `(self, other)_H`, conjugate-linear in `self`.
    pub fn inner(&self, other: &HVector) -> Complex64 {
        self.coeffs.dotc(&other.coeffs)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }
}

/// An element of `A_N`, stored as its matrix in the Hermite basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    matrix: CMatrix,
}

impl AlgebraElement {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        Ok(AlgebraElement { matrix })
    }

    pub(crate) fn from_matrix(matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        AlgebraElement { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        AlgebraElement { matrix: CMatrix::identity(dim, dim) }
    }

    pub fn zero(dim: usize) -> Self {
        AlgebraElement { matrix: CMatrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn apply(&self, k: &HVector) -> Result<HVector> {
        if k.coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: k.coeffs.len() });
        }
        Ok(HVector { space: k.space, coeffs: &self.matrix * &k.coeffs })
    }

    pub fn scale(&self, r: Complex64) -> Self {
        AlgebraElement { matrix: self.matrix.map(|x| x * r) }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { matrix: &self.matrix * &rhs.matrix }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement { matrix: -&self.matrix }
    }
}

/// `a*`, the conjugate transpose.
pub fn star(a: &AlgebraElement) -> AlgebraElement {
    AlgebraElement { matrix: a.matrix.adjoint() }
}

/// `|a|_A = sup_{|k| ≤ 1} |a k|`, the largest singular value.
pub fn op_norm(a: &AlgebraElement) -> f64 {
    linalg::op_norm(&a.matrix)
}

/// `k ⊗ l*`, the map `m ↦ (l, m)_H k`.
pub fn rank_one(k: &HVector, l: &HVector) -> Result<AlgebraElement> {
    if k.coeffs.len() != l.coeffs.len() {
        return Err(Error::DimensionMismatch { expected: k.coeffs.len(), found: l.coeffs.len() });
    }
    Ok(AlgebraElement { matrix: &k.coeffs * l.coeffs.adjoint() })
}

/// Measurements behind a positivity verdict.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityWitness {
    pub positive: bool,
    /// `|a − a*|` (Frobenius).
    pub hermitian_defect: f64,
    /// Smallest eigenvalue of the hermitian part.
    pub min_eigenvalue: f64,
    /// `|a|` used to scale the tolerance.
    pub scale: f64,
}

/// `a ≥ 0`: hermitian with spectrum in `[0, ∞)`, both up to `tol · |a|`.
pub fn is_positive(a: &AlgebraElement, tol: f64) -> PositivityWitness {
    let scale = op_norm(a);
    let hermitian_defect = linalg::hermitian_defect(&a.matrix);
    let min_eigenvalue = linalg::hermitian_eigenvalues(&a.matrix).first().copied().unwrap_or(0.0);
    let positive = hermitian_defect <= tol * scale && min_eigenvalue >= -tol * scale;
    PositivityWitness { positive, hermitian_defect, min_eigenvalue, scale }
}

/// Ascending real spectrum of a hermitian element.
pub fn hermitian_spectrum(a: &AlgebraElement) -> Result<Vec<f64>> {
    let defect = linalg::hermitian_defect(&a.matrix);
    if defect > 1e-10 * op_norm(a).max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(linalg::hermitian_eigenvalues(&a.matrix))
}

/// `|a* a| - |a|^2`, relative. Zero for every element of a C*-algebra.
pub fn cstar_identity_residual(a: &AlgebraElement) -> f64 {
    let n = op_norm(a);
    let lhs = op_norm(&(&star(a) * a));
    linalg::rel_residual((lhs - n * n).abs(), n * n)
}
