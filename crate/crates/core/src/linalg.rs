//! Small dense linear-algebra helpers over `Complex64` shared by every module.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative singular-value threshold used for every numerical rank.
pub const RANK_REL_TOL: f64 = 1e-8;

pub fn real_to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Singular values in descending order. Empty matrices have none.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value (operator 2-norm).
pub fn op_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `rel * sigma_max`.
pub fn numerical_rank(m: &CMatrix, rel: f64) -> usize {
    let s = singular_values(m);
    rank_from_singular_values(&s, rel)
}

pub fn rank_from_singular_values(s: &[f64], rel: f64) -> usize {
    match s.first() {
        Some(&max) if max > 0.0 => s.iter().filter(|&&x| x > rel * max).count(),
        _ => 0,
    }
}

/// Orthonormal (standard inner product) basis of the null space, as columns.
///
/// The matrix is padded with zero rows to square shape first, because the thin
/// SVD would otherwise drop the trailing right singular vectors.
pub fn null_space(m: &CMatrix, rel: f64) -> CMatrix {
    let n = m.ncols();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let rows = m.nrows().max(n);
    let mut padded = CMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let s = &svd.singular_values;
    let max = s.iter().copied().fold(0.0, f64::max);
    let cols: Vec<CVector> = (0..s.len())
        .filter(|&i| max == 0.0 || s[i] <= rel * max)
        .map(|i| v_t.row(i).adjoint())
        .collect();
    columns_to_matrix(n, &cols)
}

/// Orthonormal basis of the column space, as columns.
///
/// Built as `m v_i / s_i` from the right singular vectors and then
/// re-orthonormalised: the left factor returned by the complex SVD loses its
/// span on strongly rank-deficient inputs, while the right factor does not.
pub fn column_space(m: &CMatrix, rel: f64) -> CMatrix {
    let rows = m.nrows();
    let n = m.ncols();
    if rows == 0 || n == 0 {
        return CMatrix::zeros(rows, 0);
    }
    let mut padded = CMatrix::zeros(rows.max(n), n);
    padded.view_mut((0, 0), (rows, n)).copy_from(m);
    let svd = padded.svd(true, true);
    let v_t = svd.v_t.expect("requested v_t");
    let s = &svd.singular_values;
    let max = s.iter().copied().fold(0.0, f64::max);
    let images: Vec<CVector> = (0..s.len())
        .filter(|&i| max > 0.0 && s[i] > rel * max)
        .map(|i| (m * v_t.row(i).adjoint()).unscale(s[i]))
        .collect();
    if images.is_empty() {
        return CMatrix::zeros(rows, 0);
    }
    columns_to_matrix(rows, &images).qr().q()
}

pub fn columns_to_matrix(rows: usize, cols: &[CVector]) -> CMatrix {
    let mut out = CMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Frobenius norm of `a - a^H`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

/// Ascending eigenvalues of the hermitian part of `a`.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let h = (a + a.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigen-decomposition of the hermitian part: ascending eigenvalues with
/// matching eigenvector columns.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let h = (a + a.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `diff / scale`, or `diff` itself when the scale vanishes.
pub fn rel_residual(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Principal submatrix on the given index set.
pub fn compress(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}
