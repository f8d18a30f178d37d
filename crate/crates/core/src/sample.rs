//! Seeded random sampling of test data.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cstar::{AlgebraElement, HVector, HermiteSpace};
use crate::exterior::{Covector, Metric};
use crate::linalg::{CMatrix, CVector};
use crate::oscillator::SpElement;

/// Deterministic sampler; identical seeds give identical streams.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.gen()
    }

    pub fn complex(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }

    pub fn cvector(&mut self, n: usize) -> CVector {
        CVector::from_fn(n, |_, _| self.complex())
    }

    pub fn cmatrix(&mut self, r: usize, c: usize) -> CMatrix {
        CMatrix::from_fn(r, c, |_, _| self.complex())
    }

    pub fn hvector(&mut self, space: HermiteSpace) -> HVector {
        let v = self.cvector(space.dim());
        HVector::new(space, v).expect("sized by space")
    }

    pub fn algebra_element(&mut self, dim: usize) -> AlgebraElement {
        AlgebraElement::new(self.cmatrix(dim, dim)).expect("square")
    }

    pub fn hermitian_element(&mut self, dim: usize) -> AlgebraElement {
        let m = self.cmatrix(dim, dim);
        AlgebraElement::new((&m + m.adjoint()).scale(0.5)).expect("square")
    }

    /// Unitary from the QR factor of a Gaussian matrix.
    pub fn unitary(&mut self, dim: usize) -> AlgebraElement {
        let q = self.cmatrix(dim, dim).qr().q();
        AlgebraElement::new(q).expect("square")
    }

    /// Gaussian covector, redrawn until nonzero.
    pub fn covector(&mut self, dim: usize) -> Covector {
        loop {
            let c: Vec<f64> = (0..dim).map(|_| self.normal()).collect();
            if c.iter().any(|&x| x != 0.0) {
                return Covector::new(c);
            }
        }
    }

    /// Uniform point on the unit sphere of `R^dim`.
    pub fn unit_covector(&mut self, dim: usize) -> Covector {
        let c = self.covector(dim);
        let n = c.components.iter().map(|x| x * x).sum::<f64>().sqrt();
        Covector::new(c.components.iter().map(|x| x / n).collect())
    }

    /// `B Bᵀ + dim·I` with Gaussian `B`: well-conditioned and positive definite.
    pub fn metric(&mut self, dim: usize) -> Metric {
        let b = DMatrix::from_fn(dim, dim, |_, _| self.normal());
        let m = &b * b.transpose() + DMatrix::identity(dim, dim) * dim as f64;
        let sym = (&m + m.transpose()) * 0.5;
        Metric::new(sym).expect("positive definite by construction")
    }

    /// Random element of `sp(2n)`: `S = −J A` with Gaussian symmetric `A`.
    pub fn sp_element(&mut self, dim2n: usize) -> SpElement {
        let b = DMatrix::from_fn(dim2n, dim2n, |_, _| self.normal());
        let a = (&b + b.transpose()) * 0.5;
        SpElement::from_hamiltonian(&a).expect("symmetric by construction")
    }
}
