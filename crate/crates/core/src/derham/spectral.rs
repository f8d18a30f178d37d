use rayon::prelude::*;
use serde::Serialize;

use super::{d_nabla, sobolev_gram, BlockDiagonal, ConnectionSpec, TorusModel};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::sample::Sampler;

/// Eigenvalues below `KERNEL_REL_TOL · λ_max` count as harmonic.
pub const KERNEL_REL_TOL: f64 = 1e-8;

/// Assembled `d_k^∇`, Gram adjoints, Gram forms and Laplacians for every degree.
#[derive(Clone, Debug)]
pub struct ComplexAssembly {
    spec: ConnectionSpec,
    sobolev_index: i32,
    dim2n: usize,
    section_dims: Vec<usize>,
    hermite_dim: usize,
    forms_per_degree: Vec<usize>,
    d: Vec<BlockDiagonal>,
    d_adjoint: Vec<BlockDiagonal>,
    gram: Vec<BlockDiagonal>,
    laplacian: Vec<BlockDiagonal>,
}

/// Harmonic-space summary of one degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarmonicReport {
    pub degree: usize,
    /// Complex dimension of `ker Δ_k`.
    pub complex_dim: usize,
    /// `complex_dim / dim H_N` when the kernel is `V ⊗ H_N`.
    pub a_rank: Option<usize>,
    /// Whether the kernel projector commutes with `Id ⊗ a` for sampled `a`.
    pub product_form: bool,
    /// Smallest eigenvalue above the kernel threshold.
    pub spectral_gap: Option<f64>,
    /// Kernel dimension unchanged at `tol · 10` and `tol / 10`.
    pub determinate: bool,
    pub threshold: f64,
    pub min_eigenvalue: f64,
}

impl ComplexAssembly {
    pub fn build(spec: &ConnectionSpec, model: &TorusModel, sobolev_index: i32) -> Result<Self> {
        spec.validate(model.dim2n())?;
        let n = model.dim2n();
        let d: Vec<BlockDiagonal> = (0..=n).map(|k| d_nabla(k, spec, model)).collect::<Result<_>>()?;
        let gram: Vec<BlockDiagonal> =
            (0..=n).map(|k| sobolev_gram(sobolev_index, k, model)).collect::<Result<_>>()?;
        // d*_k = Gram_k⁻¹ d_kᴴ Gram_{k+1}, mapping degree k+1 back to k
        let d_adjoint: Vec<BlockDiagonal> = (0..=n)
            .map(|k| {
                let blocks = (0..model.modes().len())
                    .into_par_iter()
                    .map(|i| {
                        let gk_inv = gram[k].block(i).clone().try_inverse().expect("Gram blocks are positive definite");
                        let next = if k < n {
                            gram[k + 1].block(i).clone()
                        } else {
                            CMatrix::zeros(0, 0)
                        };
                        gk_inv * d[k].block(i).adjoint() * next
                    })
                    .collect();
                BlockDiagonal::new(blocks)
            })
            .collect();
        let laplacian = (0..=n)
            .map(|k| {
                let up = d_adjoint[k].mul(&d[k]);
                if k == 0 {
                    up
                } else {
                    d[k - 1].mul(&d_adjoint[k - 1]).add(&up)
                }
            })
            .collect();
        Ok(ComplexAssembly {
            spec: spec.clone(),
            sobolev_index,
            dim2n: n,
            section_dims: (0..=n).map(|k| model.section_dim(k)).collect(),
            hermite_dim: model.space().dim(),
            forms_per_degree: (0..=n).map(|k| model.basis().len(k)).collect(),
            d,
            d_adjoint,
            gram,
            laplacian,
        })
    }

    pub fn spec(&self) -> &ConnectionSpec {
        &self.spec
    }

    pub fn sobolev_index(&self) -> i32 {
        self.sobolev_index
    }

    fn check(&self, k: usize) -> Result<()> {
        if k > self.dim2n {
            return Err(Error::DegreeOutOfRange { degree: k, dim: self.dim2n });
        }
        Ok(())
    }

    pub fn d(&self, k: usize) -> Result<&BlockDiagonal> {
        self.check(k)?;
        Ok(&self.d[k])
    }

    /// Gram adjoint of `d_k`, from degree `k+1` to degree `k`.
    pub fn d_adjoint(&self, k: usize) -> Result<&BlockDiagonal> {
        self.check(k)?;
        Ok(&self.d_adjoint[k])
    }

    pub fn gram(&self, k: usize) -> Result<&BlockDiagonal> {
        self.check(k)?;
        Ok(&self.gram[k])
    }

    pub fn laplacian(&self, k: usize) -> Result<&BlockDiagonal> {
        self.check(k)?;
        Ok(&self.laplacian[k])
    }

    /// `|Gram Δ − (Gram Δ)ᴴ| / |Gram Δ|`, zero when `Δ_k` is Gram-self-adjoint.
    pub fn hermitian_defect(&self, k: usize) -> Result<f64> {
        self.check(k)?;
        let (mut num, mut den) = (0.0, 0.0);
        for (g, l) in self.gram[k].blocks().iter().zip(self.laplacian[k].blocks()) {
            let gl = g * l;
            num += (&gl - gl.adjoint()).norm_squared();
            den += gl.norm_squared();
        }
        Ok(linalg::rel_residual(num.sqrt(), den.sqrt()))
    }

    /// `max_k |d_{k+1} d_k|`.
    pub fn d_squared_defect(&self) -> f64 {
        (0..self.dim2n).map(|k| self.d[k + 1].mul(&self.d[k]).op_norm()).fold(0.0, f64::max)
    }

    /// Eigen-decomposition of block `i` of `Δ_k`. With `Gram = L Lᴴ`,
    /// `Lᴴ Δ L⁻ᴴ` is hermitian; returned vectors are `L⁻ᴴ W`, Gram-orthonormal.
    pub fn block_eigen(&self, k: usize, i: usize) -> Result<(Vec<f64>, CMatrix)> {
        self.check(k)?;
        let g = self.gram[k].block(i);
        if g.nrows() == 0 {
            return Ok((Vec::new(), CMatrix::zeros(0, 0)));
        }
        let l = g.clone().cholesky().expect("Gram blocks are positive definite").l();
        let l_inv_h = l.adjoint().try_inverse().expect("cholesky factor is invertible");
        let h = l.adjoint() * self.laplacian[k].block(i) * &l_inv_h;
        let (values, w) = linalg::hermitian_eigen(&h);
        Ok((values, l_inv_h * w))
    }

    /// Spectrum of `Δ_k`, one ascending list per mode block.
    pub fn block_spectra(&self, k: usize) -> Result<Vec<Vec<f64>>> {
        self.check(k)?;
        (0..self.laplacian[k].blocks().len())
            .into_par_iter()
            .map(|i| self.block_eigen(k, i).map(|(v, _)| v))
            .collect()
    }

    /// All eigenvalues of `Δ_k`, ascending.
    pub fn spectrum(&self, k: usize) -> Result<Vec<f64>> {
        let mut all: Vec<f64> = self.block_spectra(k)?.into_iter().flatten().collect();
        all.sort_by(f64::total_cmp);
        Ok(all)
    }

    pub fn harmonic_report(&self, k: usize, tol: f64) -> Result<HarmonicReport> {
        let spectra = self.block_spectra(k)?;
        let lambda_max = spectra.iter().flatten().copied().fold(0.0, f64::max);
        let count = |rel: f64| {
            let thr = rel * lambda_max;
            spectra.iter().flatten().filter(|&&x| x <= thr).count()
        };
        let threshold = tol * lambda_max;
        let complex_dim = count(tol);
        let determinate = count(tol * 10.0) == complex_dim && count(tol / 10.0) == complex_dim;
        let spectral_gap = spectra
            .iter()
            .flatten()
            .copied()
            .filter(|&x| x > threshold)
            .min_by(f64::total_cmp);
        let min_eigenvalue = spectra.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        let product_form = self.kernel_is_product_form(k, &spectra, threshold)?;
        let a_rank = (product_form && complex_dim % self.hermite_dim == 0).then(|| complex_dim / self.hermite_dim);
        Ok(HarmonicReport {
            degree: k,
            complex_dim,
            a_rank,
            product_form,
            spectral_gap,
            determinate,
            threshold,
            min_eigenvalue: if min_eigenvalue.is_finite() { min_eigenvalue } else { 0.0 },
        })
    }

    /// Checks that the harmonic projector of every block commutes with
    /// `Id_form ⊗ a` for a few seeded random `a`.
    fn kernel_is_product_form(&self, k: usize, spectra: &[Vec<f64>], threshold: f64) -> Result<bool> {
        let h = self.hermite_dim;
        let forms = self.forms_per_degree[k];
        let mut sampler = Sampler::new(0x5eed);
        let probes: Vec<CMatrix> = (0..2)
            .map(|_| linalg::kron(&CMatrix::identity(forms, forms), &sampler.cmatrix(h, h)))
            .collect();
        for (i, values) in spectra.iter().enumerate() {
            let kernel: Vec<usize> = (0..values.len()).filter(|&j| values[j] <= threshold).collect();
            if kernel.is_empty() {
                continue;
            }
            if !kernel.len().is_multiple_of(h) {
                return Ok(false);
            }
            let (_, vectors) = self.block_eigen(k, i)?;
            let v = CMatrix::from_fn(vectors.nrows(), kernel.len(), |r, c| vectors[(r, kernel[c])]);
            let p = &v * v.adjoint() * self.gram[k].block(i);
            for a in &probes {
                let defect = (&p * a - a * &p).norm();
                if defect > 1e-8 * a.norm() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `dim ker d_k − rank d_{k−1}`, by numerical rank at `tol` relative to
    /// the largest singular value of each operator.
    pub fn cohomology_rank(&self, k: usize, tol: f64) -> usize {
        if k > self.dim2n {
            return 0;
        }
        let rank = |m: &BlockDiagonal| {
            let s: Vec<Vec<f64>> = m.blocks().par_iter().map(linalg::singular_values).collect();
            let max = s.iter().flatten().copied().fold(0.0, f64::max);
            if max == 0.0 {
                0
            } else {
                s.iter().flatten().filter(|&&x| x > tol * max).count()
            }
        };
        let kernel = self.section_dims[k] - rank(&self.d[k]);
        let image = if k == 0 { 0 } else { rank(&self.d[k - 1]) };
        kernel - image
    }
}

/// `Δ_k` with adjoints taken in the `(,)_t` Gram form.
pub fn laplacian(k: usize, spec: &ConnectionSpec, model: &TorusModel, t: i32) -> Result<BlockDiagonal> {
    let asm = ComplexAssembly::build(spec, model, t)?;
    asm.laplacian(k).cloned()
}

pub fn harmonic_rank(k: usize, spec: &ConnectionSpec, model: &TorusModel, tol: f64) -> Result<HarmonicReport> {
    ComplexAssembly::build(spec, model, 0)?.harmonic_report(k, tol)
}

pub fn cohomology_rank(k: usize, spec: &ConnectionSpec, model: &TorusModel) -> Result<usize> {
    if k > model.dim2n() {
        return Ok(0);
    }
    Ok(ComplexAssembly::build(spec, model, 0)?.cohomology_rank(k, KERNEL_REL_TOL))
}
