//! Infinitesimal Segal–Shale–Weil action of `sp(2n, R)` on `H_N`.
//!
//! Hermite functions `h_j` realise `L²(R^n)`; position `X_a` and derivative
//! `D_a` are tridiagonal ladder matrices. A symplectic Lie-algebra element `S`
//! acts through the Weyl quantisation of `ω(Sz, z)`:
//!
//! `ρ′(S) = −(i/2) Op(ω(Sz, z)) = (i/2) Σ_ab (J S)_ab Z_a Z_b`,
//!
//! with `Z = (X_1..X_n, P_1..P_n)`, `P = −i D`, `ω(z, w) = zᵀ J w` and
//! `J = [[0, I], [−I, 0]]`. With this sign `ρ′(J) = −i(N̂ + n/2)` and
//! `[ρ′(S1), ρ′(S2)] = ρ′([S1, S2])`.
//!
//! Truncation only disturbs entries touching the top two Hermite levels, so
//! every identity is checked on the interior block (indices `≤ N − 3`).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cstar::{AlgebraElement, HermiteSpace};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, I};

/// Hermite levels at the top of each factor excluded from the interior block.
pub const INTERIOR_MARGIN: usize = 2;

/// The standard symplectic matrix `[[0, I], [−I, 0]]`.
pub fn standard_symplectic(dim2n: usize) -> DMatrix<f64> {
    let n = dim2n / 2;
    DMatrix::from_fn(dim2n, dim2n, |i, j| {
        if j == i + n {
            1.0
        } else if i == j + n {
            -1.0
        } else {
            0.0
        }
    })
}

/// An element of `sp(2n, R)`: `Sᵀ J + J S = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SpElement {
    matrix: DMatrix<f64>,
}

impl SpElement {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() || n == 0 || !n.is_multiple_of(2) {
            return Err(Error::OddDimension(n));
        }
        let defect = symplectic_defect(&matrix);
        if defect > 1e-12 * matrix.norm().max(1.0) {
            return Err(Error::NotSymplectic { defect });
        }
        Ok(SpElement { matrix })
    }

    /// `S = −J A` for symmetric `A`, i.e. the Hamiltonian vector field of `½ zᵀ A z`.
    pub fn from_hamiltonian(a: &DMatrix<f64>) -> Result<Self> {
        let j = standard_symplectic(a.nrows());
        Self::new(-(j * a))
    }

    pub fn zero(dim2n: usize) -> Self {
        SpElement { matrix: DMatrix::zeros(dim2n, dim2n) }
    }

    pub fn dim2n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `[S1, S2]` as matrices.
    pub fn bracket(&self, other: &SpElement) -> SpElement {
        SpElement { matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix }
    }

    pub fn scale(&self, r: f64) -> SpElement {
        SpElement { matrix: &self.matrix * r }
    }

    pub fn add(&self, other: &SpElement) -> SpElement {
        SpElement { matrix: &self.matrix + &other.matrix }
    }
}

/// `|Sᵀ J + J S|` (Frobenius).
pub fn symplectic_defect(s: &DMatrix<f64>) -> f64 {
    let j = standard_symplectic(s.nrows());
    (s.transpose() * &j + &j * s).norm()
}

impl TryFrom<Vec<Vec<f64>>> for SpElement {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: rows.first().map_or(0, Vec::len) });
        }
        SpElement::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

impl From<SpElement> for Vec<Vec<f64>> {
    fn from(s: SpElement) -> Self {
        s.matrix.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

/// The `sl(2) = sp(2)` triple `H = diag(1, −1)`, `E = e_12`, `F = e_21`.
pub fn sl2_triple() -> (SpElement, SpElement, SpElement) {
    let h = SpElement { matrix: DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]) };
    let e = SpElement { matrix: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]) };
    let f = SpElement { matrix: DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]) };
    (h, e, f)
}

/// Position and derivative matrices for every degree of freedom, placed in
/// the tensor-product Hermite basis.
#[derive(Clone, Debug)]
pub struct LadderSet {
    space: HermiteSpace,
    position: Vec<CMatrix>,
    derivative: Vec<CMatrix>,
}

impl LadderSet {
    pub fn space(&self) -> HermiteSpace {
        self.space
    }

    pub fn position(&self, a: usize) -> &CMatrix {
        &self.position[a]
    }

    pub fn derivative(&self, a: usize) -> &CMatrix {
        &self.derivative[a]
    }

    /// `P_a = −i D_a`.
    pub fn momentum(&self, a: usize) -> CMatrix {
        self.derivative[a].map(|x| x * -I)
    }

    /// Flat indices of the interior block.
    pub fn interior(&self) -> Vec<usize> {
        self.space.interior(INTERIOR_MARGIN)
    }
}

/// Single-factor `X` and `D`: `X h_j = √((j+1)/2) h_{j+1} + √(j/2) h_{j−1}`,
/// `D h_j = √(j/2) h_{j−1} − √((j+1)/2) h_{j+1}`.
fn single_ladders(cutoff: usize) -> (CMatrix, CMatrix) {
    let mut x = CMatrix::zeros(cutoff, cutoff);
    let mut d = CMatrix::zeros(cutoff, cutoff);
    for j in 0..cutoff - 1 {
        let c = ((j + 1) as f64 / 2.0).sqrt();
        // column j holds the image of h_j
        x[(j + 1, j)] = Complex64::new(c, 0.0);
        x[(j, j + 1)] = Complex64::new(c, 0.0);
        d[(j + 1, j)] = Complex64::new(-c, 0.0);
        d[(j, j + 1)] = Complex64::new(c, 0.0);
    }
    (x, d)
}

/// `I ⊗ … ⊗ m ⊗ … ⊗ I` with `m` in slot `a` (first slot most significant).
fn place(m: &CMatrix, a: usize, space: HermiteSpace) -> CMatrix {
    let id = CMatrix::identity(space.cutoff, space.cutoff);
    let mut out = CMatrix::identity(1, 1);
    for slot in 0..space.n_dof {
        out = linalg::kron(&out, if slot == a { m } else { &id });
    }
    out
}

pub fn ladder_matrices(n_dof: usize, cutoff: usize) -> Result<LadderSet> {
    if cutoff < 2 {
        return Err(Error::CutoffTooSmall(cutoff));
    }
    let space = HermiteSpace::new(n_dof, cutoff);
    let (x, d) = single_ladders(cutoff);
    let position = (0..n_dof).map(|a| place(&x, a, space)).collect();
    let derivative = (0..n_dof).map(|a| place(&d, a, space)).collect();
    Ok(LadderSet { space, position, derivative })
}

/// `ρ′(S) = (i/2) Σ (J S)_ab Z_a Z_b`.
pub fn quantize(s: &SpElement, ladders: &LadderSet) -> Result<AlgebraElement> {
    let n = ladders.space.n_dof;
    if s.dim2n() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, found: s.dim2n() });
    }
    let a = standard_symplectic(2 * n) * s.matrix();
    let z: Vec<CMatrix> = (0..n)
        .map(|k| ladders.position[k].clone())
        .chain((0..n).map(|k| ladders.momentum(k)))
        .collect();
    let dim = ladders.space.dim();
    let mut acc = CMatrix::zeros(dim, dim);
    for p in 0..2 * n {
        for q in 0..2 * n {
            let coeff = a[(p, q)];
            if coeff != 0.0 {
                acc += (&z[p] * &z[q]).scale(coeff);
            }
        }
    }
    Ok(AlgebraElement::from_matrix(acc.map(|x| x * I * 0.5)))
}

/// Operator norm of `M` restricted to the interior block.
pub fn interior_norm(m: &CMatrix, ladders: &LadderSet) -> f64 {
    linalg::op_norm(&linalg::compress(m, &ladders.interior()))
}

/// `|[ρ′(S1), ρ′(S2)] − ρ′([S1, S2])|` on the interior block.
pub fn commutator_defect(s1: &SpElement, s2: &SpElement, ladders: &LadderSet) -> Result<f64> {
    if s1.dim2n() != s2.dim2n() {
        return Err(Error::DimensionMismatch { expected: s1.dim2n(), found: s2.dim2n() });
    }
    let r1 = quantize(s1, ladders)?;
    let r2 = quantize(s2, ladders)?;
    let r12 = quantize(&s1.bracket(s2), ladders)?;
    let diff = linalg::commutator(r1.matrix(), r2.matrix()) - r12.matrix();
    Ok(interior_norm(&diff, ladders))
}

/// `|ρ′(S) + ρ′(S)*|` on the interior block.
pub fn skew_defect(s: &SpElement, ladders: &LadderSet) -> Result<f64> {
    let r = quantize(s, ladders)?;
    Ok(interior_norm(&(r.matrix() + r.matrix().adjoint()), ladders))
}

/// Projectors onto even and odd total Hermite degree.
pub fn parity_projectors(ladders: &LadderSet) -> (AlgebraElement, AlgebraElement) {
    let space = ladders.space;
    let dim = space.dim();
    let mut even = CMatrix::zeros(dim, dim);
    let mut odd = CMatrix::zeros(dim, dim);
    for f in 0..dim {
        if space.multi_index(f).iter().sum::<usize>() % 2 == 0 {
            even[(f, f)] = linalg::ONE;
        } else {
            odd[(f, f)] = linalg::ONE;
        }
    }
    (AlgebraElement::from_matrix(even), AlgebraElement::from_matrix(odd))
}

/// `|[ρ′(S), P_even]|` on the interior block.
pub fn parity_defect(s: &SpElement, ladders: &LadderSet) -> Result<f64> {
    let r = quantize(s, ladders)?;
    let (even, _) = parity_projectors(ladders);
    Ok(interior_norm(&linalg::commutator(r.matrix(), even.matrix()), ladders))
}

/// Spectrum of `i ρ′(S)` on the interior block, ascending. For skew-adjoint
/// `ρ′(S)` these are the negated imaginary parts of its eigenvalues.
pub fn interior_spectrum(s: &SpElement, ladders: &LadderSet) -> Result<Vec<f64>> {
    let r = quantize(s, ladders)?;
    let block = linalg::compress(&r.matrix().map(|x| x * I), &ladders.interior());
    Ok(linalg::hermitian_eigenvalues(&block))
}
