//! Exterior algebra of `V*` for `V = R^{2n}`.
//!
//! Basis monomials `dx^{i_1} ∧ … ∧ dx^{i_k}` are stored as bitmasks. Within a
//! degree they are ordered lexicographically on the increasing index tuple;
//! the full algebra is ordered degree-major. Every matrix in this crate that
//! acts on form coordinates uses that ordering.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE, RANK_REL_TOL, ZERO};

/// Maximum supported ambient dimension (bitmask width and sanity).
pub const MAX_DIM: usize = 16;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub(crate) fn check_dim(dim2n: usize) -> Result<()> {
    if dim2n == 0 || !dim2n.is_multiple_of(2) || dim2n > MAX_DIM {
        return Err(Error::OddDimension(dim2n));
    }
    Ok(())
}

/// A basis monomial of `⋀^k V*`, i.e. a strictly increasing index tuple.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormBasisIndex(u32);

impl FormBasisIndex {
    /// Builds an index from 1-based, strictly increasing positions.
    pub fn new(indices: &[usize], dim2n: usize) -> Result<Self> {
        let mut mask = 0u32;
        let mut prev = 0;
        for &i in indices {
            if i == 0 || i > dim2n || i <= prev {
                return Err(Error::DegreeOutOfRange { degree: indices.len(), dim: dim2n });
            }
            mask |= 1 << (i - 1);
            prev = i;
        }
        Ok(FormBasisIndex(mask))
    }

    pub fn from_mask(mask: u32) -> Self {
        FormBasisIndex(mask)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    /// 1-based positions, increasing.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 & (1 << b) != 0).map(|b| b + 1).collect()
    }

    fn zero_based(self) -> impl Iterator<Item = usize> {
        let m = self.0;
        (0..32usize).filter(move |b| m & (1 << b) != 0)
    }
}

impl fmt::Debug for FormBasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.indices())
    }
}

/// Sign of `dx^A ∧ dx^B` relative to the sorted monomial, or `None` when they overlap.
pub fn wedge_sign(a: FormBasisIndex, b: FormBasisIndex) -> Option<f64> {
    if a.0 & b.0 != 0 {
        return None;
    }
    // count inversions: pairs (i in A, j in B) with i > j
    let inversions: u32 = b.zero_based().map(|j| (a.0 >> (j + 1)).count_ones()).sum();
    Some(if inversions.is_multiple_of(2) { 1.0 } else { -1.0 })
}

/// Canonical ordered bases of every degree for a fixed `2n`.
#[derive(Clone, Debug)]
pub struct ExteriorBasis {
    dim2n: usize,
    by_degree: Vec<Vec<FormBasisIndex>>,
    // position of each mask inside its own degree
    position: Vec<usize>,
    offsets: Vec<usize>,
}

impl ExteriorBasis {
    pub fn new(dim2n: usize) -> Result<Self> {
        check_dim(dim2n)?;
        let mut by_degree: Vec<Vec<FormBasisIndex>> = vec![Vec::new(); dim2n + 1];
        let mut all: Vec<u32> = (0..(1u32 << dim2n)).collect();
        // lexicographic order on the increasing tuples
        all.sort_by_key(|&m| FormBasisIndex(m).indices());
        for m in all {
            let idx = FormBasisIndex(m);
            by_degree[idx.degree()].push(idx);
        }
        let mut position = vec![0; 1 << dim2n];
        for list in &by_degree {
            for (p, idx) in list.iter().enumerate() {
                position[idx.0 as usize] = p;
            }
        }
        let mut offsets = Vec::with_capacity(dim2n + 2);
        let mut acc = 0;
        for list in &by_degree {
            offsets.push(acc);
            acc += list.len();
        }
        offsets.push(acc);
        Ok(ExteriorBasis { dim2n, by_degree, position, offsets })
    }

    pub fn dim2n(&self) -> usize {
        self.dim2n
    }

    pub fn degree(&self, k: usize) -> &[FormBasisIndex] {
        self.by_degree.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self, k: usize) -> usize {
        self.degree(k).len()
    }

    /// Total dimension `2^{2n}`.
    pub fn total(&self) -> usize {
        1 << self.dim2n
    }

    pub fn position(&self, idx: FormBasisIndex) -> usize {
        self.position[idx.0 as usize]
    }

    /// Offset of degree `k` inside the degree-major ordering of the whole algebra.
    pub fn offset(&self, k: usize) -> usize {
        self.offsets[k.min(self.dim2n + 1)]
    }

    /// Every basis index, degree-major.
    pub fn all(&self) -> impl Iterator<Item = FormBasisIndex> + '_ {
        self.by_degree.iter().flatten().copied()
    }

    pub fn global_position(&self, idx: FormBasisIndex) -> usize {
        self.offset(idx.degree()) + self.position(idx)
    }
}

/// Positive-definite scalar product `g` on `V`, with its inverse cached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Metric {
    matrix: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

impl Metric {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() {
            return Err(Error::InvalidMetric("not square".into()));
        }
        if !matrix.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidMetric("non-finite entry".into()));
        }
        let scale = matrix.norm().max(1.0);
        if (&matrix - matrix.transpose()).norm() > 1e-12 * scale {
            return Err(Error::InvalidMetric("not symmetric".into()));
        }
        let min_ev = SymmetricEigen::new(matrix.clone()).eigenvalues.min();
        if min_ev <= 0.0 {
            return Err(Error::InvalidMetric(format!("smallest eigenvalue {min_ev:e}")));
        }
        let inverse = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidMetric("singular".into()))?;
        Ok(Metric { matrix, inverse })
    }

    pub fn identity(dim2n: usize) -> Self {
        Metric { matrix: DMatrix::identity(dim2n, dim2n), inverse: DMatrix::identity(dim2n, dim2n) }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// The induced metric on covectors.
    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    /// Gram matrix of the degree-`k` basis: `det(g^{-1}[I, J])`.
    pub fn form_gram(&self, basis: &ExteriorBasis, k: usize) -> DMatrix<f64> {
        let idx = basis.degree(k);
        let n = idx.len();
        let rows: Vec<Vec<usize>> = idx.iter().map(|i| i.zero_based().collect()).collect();
        DMatrix::from_fn(n, n, |a, b| {
            if k == 0 {
                return 1.0;
            }
            let sub = DMatrix::from_fn(k, k, |r, c| self.inverse[(rows[a][r], rows[b][c])]);
            sub.determinant()
        })
    }

    /// Block-diagonal Gram matrix over all degrees, degree-major.
    pub fn full_form_gram(&self, basis: &ExteriorBasis) -> DMatrix<f64> {
        let total = basis.total();
        let mut out = DMatrix::zeros(total, total);
        for k in 0..=basis.dim2n() {
            let off = basis.offset(k);
            let g = self.form_gram(basis, k);
            out.view_mut((off, off), (g.nrows(), g.ncols())).copy_from(&g);
        }
        out
    }
}

impl TryFrom<Vec<Vec<f64>>> for Metric {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMetric("ragged rows".into()));
        }
        Metric::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

impl From<Metric> for Vec<Vec<f64>> {
    fn from(m: Metric) -> Self {
        m.matrix.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

/// A real covector `ξ ∈ V*` in the dual basis `dx^1, …, dx^{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector {
    pub components: Vec<f64>,
}

/// A real vector `v ∈ V` in the basis `e_1, …, e_{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    pub components: Vec<f64>,
}

impl Covector {
    pub fn new(components: Vec<f64>) -> Self {
        Covector { components }
    }

    /// `dx^i` with 1-based `i`.
    pub fn basis(dim2n: usize, i: usize) -> Self {
        let mut c = vec![0.0; dim2n];
        c[i - 1] = 1.0;
        Covector { components: c }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&x| x == 0.0)
    }

    /// `g^{-1}(ξ, ξ)`.
    pub fn norm_sq(&self, g: &Metric) -> f64 {
        let x = nalgebra::DVector::from_column_slice(&self.components);
        (x.transpose() * g.inverse() * &x)[(0, 0)]
    }

    /// The 1-form `ξ` as a [`Form`] of degree one.
    pub fn to_form(&self) -> Form {
        Form {
            dim2n: self.dim(),
            degree: 1,
            coeffs: self.components.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }
}

impl Vector {
    pub fn new(components: Vec<f64>) -> Self {
        Vector { components }
    }

    pub fn basis(dim2n: usize, i: usize) -> Self {
        let mut c = vec![0.0; dim2n];
        c[i - 1] = 1.0;
        Vector { components: c }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }
}

/// A homogeneous complex form of degree `k` on `R^{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    dim2n: usize,
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl Form {
    pub fn zero(dim2n: usize, degree: usize) -> Self {
        Form { dim2n, degree, coeffs: vec![ZERO; binomial(dim2n, degree)] }
    }

    pub fn from_coeffs(dim2n: usize, degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        check_dim(dim2n)?;
        if degree > dim2n {
            return Err(Error::DegreeOutOfRange { degree, dim: dim2n });
        }
        let expected = binomial(dim2n, degree);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coeffs.len() });
        }
        Ok(Form { dim2n, degree, coeffs })
    }

    /// The unit monomial `dx^I` for 1-based increasing `indices`.
    pub fn monomial(basis: &ExteriorBasis, indices: &[usize]) -> Result<Self> {
        let idx = FormBasisIndex::new(indices, basis.dim2n())?;
        let mut f = Form::zero(basis.dim2n(), idx.degree());
        f.coeffs[basis.position(idx)] = ONE;
        Ok(f)
    }

    pub fn scalar(dim2n: usize, value: Complex64) -> Self {
        Form { dim2n, degree: 0, coeffs: vec![value] }
    }

    pub fn dim2n(&self) -> usize {
        self.dim2n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, basis: &ExteriorBasis, idx: FormBasisIndex) -> Complex64 {
        if idx.degree() != self.degree {
            return ZERO;
        }
        self.coeffs[basis.position(idx)]
    }

    pub fn scale(&self, r: Complex64) -> Form {
        Form { coeffs: self.coeffs.iter().map(|c| c * r).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        if self.dim2n != other.dim2n || self.degree != other.degree {
            return Err(Error::DimensionMismatch { expected: self.coeffs.len(), found: other.coeffs.len() });
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Form { coeffs, ..self.clone() })
    }

    pub fn norm_max(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// `α ∧ β`. Degrees summing past `2n` give the zero form of degree `2n`.
pub fn wedge(basis: &ExteriorBasis, alpha: &Form, beta: &Form) -> Result<Form> {
    check_same_dim(basis.dim2n(), alpha.dim2n)?;
    check_same_dim(basis.dim2n(), beta.dim2n)?;
    let deg = alpha.degree + beta.degree;
    if deg > basis.dim2n() {
        return Ok(Form::zero(basis.dim2n(), basis.dim2n()));
    }
    let mut out = Form::zero(basis.dim2n(), deg);
    for (ia, &ca) in basis.degree(alpha.degree).iter().zip(&alpha.coeffs) {
        if ca == ZERO {
            continue;
        }
        for (ib, &cb) in basis.degree(beta.degree).iter().zip(&beta.coeffs) {
            if let Some(sign) = wedge_sign(*ia, *ib) {
                let target = FormBasisIndex(ia.0 | ib.0);
                out.coeffs[basis.position(target)] += ca * cb * sign;
            }
        }
    }
    Ok(out)
}

/// Contraction `ι_v α`. Degree-zero input gives the zero scalar.
pub fn interior(basis: &ExteriorBasis, v: &Vector, alpha: &Form) -> Result<Form> {
    check_same_dim(basis.dim2n(), v.dim())?;
    check_same_dim(basis.dim2n(), alpha.dim2n)?;
    if alpha.degree == 0 {
        return Ok(Form::zero(basis.dim2n(), 0));
    }
    let mut out = Form::zero(basis.dim2n(), alpha.degree - 1);
    for (idx, &c) in basis.degree(alpha.degree).iter().zip(&alpha.coeffs) {
        for (p, slot) in idx.zero_based().enumerate() {
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let rest = FormBasisIndex(idx.0 & !(1 << slot));
            out.coeffs[basis.position(rest)] += c * (sign * v.components[slot]);
        }
    }
    Ok(out)
}

/// `ξ^g`, the vector with `ξ(v) = g(ξ^g, v)`.
pub fn sharp(xi: &Covector, g: &Metric) -> Result<Vector> {
    check_same_dim(g.dim(), xi.dim())?;
    let x = nalgebra::DVector::from_column_slice(&xi.components);
    let v = g.inverse() * x;
    Ok(Vector { components: v.iter().copied().collect() })
}

/// Extension of `g` to forms, conjugate-linear in the second slot.
/// Forms of different degree are orthogonal.
pub fn form_metric(basis: &ExteriorBasis, g: &Metric, alpha: &Form, beta: &Form) -> Result<Complex64> {
    check_same_dim(basis.dim2n(), alpha.dim2n)?;
    check_same_dim(basis.dim2n(), beta.dim2n)?;
    check_same_dim(basis.dim2n(), g.dim())?;
    if alpha.degree != beta.degree {
        return Ok(ZERO);
    }
    let gram = g.form_gram(basis, alpha.degree);
    let mut acc = ZERO;
    for (i, a) in alpha.coeffs.iter().enumerate() {
        for (j, b) in beta.coeffs.iter().enumerate() {
            acc += a * b.conj() * gram[(i, j)];
        }
    }
    Ok(acc)
}

/// Matrix of `α ↦ ξ ∧ α` from degree `k` to degree `k+1`.
pub fn ext_matrix(basis: &ExteriorBasis, xi: &Covector, k: usize) -> CMatrix {
    let rows = basis.len(k + 1);
    let cols = basis.len(k);
    let mut m = CMatrix::zeros(rows, cols);
    for (j, idx) in basis.degree(k).iter().enumerate() {
        for (a, &x) in xi.components.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            let one = FormBasisIndex(1 << a);
            if let Some(sign) = wedge_sign(one, *idx) {
                let target = FormBasisIndex(idx.0 | one.0);
                m[(basis.position(target), j)] += Complex64::new(sign * x, 0.0);
            }
        }
    }
    m
}

/// Matrix of `ι_v` from degree `k` to degree `k-1` (empty for `k = 0`).
pub fn interior_matrix(basis: &ExteriorBasis, v: &Vector, k: usize) -> CMatrix {
    if k == 0 {
        return CMatrix::zeros(0, basis.len(0));
    }
    let mut m = CMatrix::zeros(basis.len(k - 1), basis.len(k));
    for (j, idx) in basis.degree(k).iter().enumerate() {
        for (p, slot) in idx.zero_based().enumerate() {
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let rest = FormBasisIndex(idx.0 & !(1 << slot));
            m[(basis.position(rest), j)] += Complex64::new(sign * v.components[slot], 0.0);
        }
    }
    m
}

/// Places per-degree maps `k -> k + shift` into one `2^{2n}` square matrix.
fn assemble_graded(basis: &ExteriorBasis, shift: isize, block: impl Fn(usize) -> CMatrix) -> CMatrix {
    let total = basis.total();
    let mut out = CMatrix::zeros(total, total);
    for k in 0..=basis.dim2n() {
        let target = k as isize + shift;
        if target < 0 || target as usize > basis.dim2n() {
            continue;
        }
        let b = block(k);
        out.view_mut((basis.offset(target as usize), basis.offset(k)), (b.nrows(), b.ncols()))
            .copy_from(&b);
    }
    out
}

/// `ext_ξ` on the whole exterior algebra.
pub fn ext_full(basis: &ExteriorBasis, xi: &Covector) -> CMatrix {
    assemble_graded(basis, 1, |k| ext_matrix(basis, xi, k))
}

/// `ι_v` on the whole exterior algebra.
pub fn interior_full(basis: &ExteriorBasis, v: &Vector) -> CMatrix {
    assemble_graded(basis, -1, |k| interior_matrix(basis, v, k))
}

/// Per-degree ranks of `ext_ξ` and the exactness verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CartanReport {
    pub ranks: Vec<usize>,
    pub exact: bool,
    /// Relative residual of `ι_{ξ^g} ext_ξ + ext_ξ ι_{ξ^g} = g^{-1}(ξ,ξ) Id`,
    /// maximised over degrees; zero for `ξ = 0`.
    pub identity_residual: f64,
}

pub fn cartan_report(basis: &ExteriorBasis, xi: &Covector, g: &Metric) -> Result<CartanReport> {
    check_same_dim(basis.dim2n(), xi.dim())?;
    let n = basis.dim2n();
    // rank of ext_k for k = 0..2n-1; ext_{2n} maps into the zero space
    let ranks: Vec<usize> =
        (0..n).map(|k| linalg::numerical_rank(&ext_matrix(basis, xi, k), RANK_REL_TOL)).collect();
    let rank = |k: isize| if k < 0 || k as usize >= n { 0 } else { ranks[k as usize] };
    let exact = !xi.is_zero()
        && (0..=n).all(|k| rank(k as isize) + rank(k as isize - 1) == basis.len(k));
    let identity_residual = cartan_identity_residual(basis, xi, g)?;
    Ok(CartanReport { ranks, exact, identity_residual })
}

/// Max over degrees of `|ι ext + ext ι − g^{-1}(ξ,ξ) Id| / g^{-1}(ξ,ξ)` (Frobenius).
pub fn cartan_identity_residual(basis: &ExteriorBasis, xi: &Covector, g: &Metric) -> Result<f64> {
    let v = sharp(xi, g)?;
    let q = xi.norm_sq(g);
    let mut worst: f64 = 0.0;
    for k in 0..=basis.dim2n() {
        let dim = basis.len(k);
        let mut lhs = CMatrix::zeros(dim, dim);
        if k < basis.dim2n() {
            lhs += interior_matrix(basis, &v, k + 1) * ext_matrix(basis, xi, k);
        }
        if k > 0 {
            lhs += ext_matrix(basis, xi, k - 1) * interior_matrix(basis, &v, k);
        }
        let target = CMatrix::identity(dim, dim).scale(q);
        worst = worst.max(linalg::rel_residual((lhs - target).norm(), q));
    }
    Ok(worst)
}
