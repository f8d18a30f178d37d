use std::f64::consts::PI;

use num_complex::Complex64;

use super::{BlockDiagonal, TorusModel};
use crate::cstar::AlgebraElement;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::sample::Sampler;

/// A truncated section of `⋀^k T*T ⊗ H_N`: coefficients `c_{m,I,j}` stored
/// mode-major, then form index, then Hermite index.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSection {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl FourierSection {
    pub fn new(model: &TorusModel, degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        model.check_degree(degree)?;
        let expected = model.section_dim(degree);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coeffs.len() });
        }
        Ok(FourierSection { degree, coeffs })
    }

    pub fn zero(model: &TorusModel, degree: usize) -> Self {
        FourierSection { degree, coeffs: vec![linalg::ZERO; model.section_dim(degree)] }
    }

    pub fn random(model: &TorusModel, degree: usize, sampler: &mut Sampler) -> Self {
        FourierSection { degree, coeffs: sampler.cvector(model.section_dim(degree)).iter().copied().collect() }
    }

    /// A single-mode section: `fibre[(h, I)]` placed at `mode`.
    pub fn single_mode(model: &TorusModel, degree: usize, mode: &[i64], fibre: &CMatrix) -> Result<Self> {
        let idx = model
            .mode_index(mode)
            .ok_or_else(|| Error::Config(format!("mode {mode:?} outside truncation")))?;
        let h = model.space().dim();
        let forms = model.basis().len(degree);
        if fibre.shape() != (h, forms) {
            return Err(Error::DimensionMismatch { expected: h * forms, found: fibre.len() });
        }
        let mut s = Self::zero(model, degree);
        let block = model.block_dim(degree);
        for i in 0..forms {
            for j in 0..h {
                s.coeffs[idx * block + i * h + j] = fibre[(j, i)];
            }
        }
        Ok(s)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Fibre matrix `K_m` (`N^n × C(2n,k)`) at mode position `idx`.
    pub fn fibre(&self, model: &TorusModel, idx: usize) -> CMatrix {
        let h = model.space().dim();
        let forms = model.basis().len(self.degree);
        let base = idx * model.block_dim(self.degree);
        CMatrix::from_fn(h, forms, |j, i| self.coeffs[base + i * h + j])
    }
}

/// `(s, t)_Γ = ∫ (s, t)_A |vol| = Σ_m K_m(s) G_k K_m(t)ᴴ`.
pub fn section_a_product(s: &FourierSection, t: &FourierSection, model: &TorusModel) -> Result<AlgebraElement> {
    if s.degree != t.degree || s.coeffs.len() != t.coeffs.len() {
        return Err(Error::DimensionMismatch { expected: s.coeffs.len(), found: t.coeffs.len() });
    }
    if s.coeffs.len() != model.section_dim(s.degree) {
        return Err(Error::DimensionMismatch { expected: model.section_dim(s.degree), found: s.coeffs.len() });
    }
    let gram = linalg::real_to_complex(&model.metric().form_gram(model.basis(), s.degree));
    let h = model.space().dim();
    let mut acc = CMatrix::zeros(h, h);
    for idx in 0..model.modes().len() {
        acc += s.fibre(model, idx) * &gram * t.fibre(model, idx).adjoint();
    }
    AlgebraElement::new(acc)
}

/// `(1 + 4π²|m|²)^t`.
pub fn sobolev_weight(mode: &[i64], t: i32) -> f64 {
    let m2: f64 = mode.iter().map(|&x| (x * x) as f64).sum();
    (1.0 + 4.0 * PI * PI * m2).powi(t)
}

/// Gram matrix of `(,)_t` on degree-`k` sections: `w_m^t (G_k ⊗ Id)` per mode.
pub fn sobolev_gram(t: i32, k: usize, model: &TorusModel) -> Result<BlockDiagonal> {
    model.check_degree(k)?;
    let h = model.space().dim();
    let fibre = linalg::kron(
        &linalg::real_to_complex(&model.metric().form_gram(model.basis(), k)),
        &CMatrix::identity(h, h),
    );
    let blocks = model.modes().iter().map(|m| fibre.scale(sobolev_weight(m, t))).collect();
    Ok(BlockDiagonal::new(blocks))
}

/// `(s, s)_t`, real and nonnegative.
pub fn sobolev_norm_sq(s: &FourierSection, t: i32, model: &TorusModel) -> Result<f64> {
    let g = sobolev_gram(t, s.degree, model)?;
    let gs = g.apply(&s.coeffs);
    Ok(CVector::from_column_slice(&s.coeffs).dotc(&CVector::from_vec(gs)).re)
}
