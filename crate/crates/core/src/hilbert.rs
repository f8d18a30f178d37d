//! The truncated higher oscillatory module `C•_N = ⋀•V* ⊗ H_N` as a Hilbert
//! `A_N`-module.
//!
//! A [`ModuleElement`] is stored as an `N^n × 2^{2n}` matrix whose column `I`
//! is the `H_N`-component attached to the basis form `U_I` (degree-major
//! order). In that layout the `A`-action is left multiplication, a form-part
//! morphism `F` acts as right multiplication by `Fᵀ`, and the `A`-valued product
//! is `(u, v) = K_u G K_vᴴ` with `G` the Gram matrix of the form metric.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cstar::{self, AlgebraElement, HVector, HermiteSpace};
use crate::error::{Error, Result};
use crate::exterior::{ExteriorBasis, Form, Metric};
use crate::linalg::{self, CMatrix, ONE};
use crate::sample::Sampler;

/// An element of `C•_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleElement {
    space: HermiteSpace,
    components: CMatrix,
}

impl ModuleElement {
    pub fn zero(basis: &ExteriorBasis, space: HermiteSpace) -> Self {
        ModuleElement { space, components: CMatrix::zeros(space.dim(), basis.total()) }
    }

    /// `components[(h, I)]`: Hermite coefficient `h` of the component on `U_I`.
    pub fn from_components(basis: &ExteriorBasis, space: HermiteSpace, components: CMatrix) -> Result<Self> {
        if components.shape() != (space.dim(), basis.total()) {
            return Err(Error::DimensionMismatch {
                expected: space.dim() * basis.total(),
                found: components.len(),
            });
        }
        Ok(ModuleElement { space, components })
    }

    /// The homogeneous element `α ⊗ k`.
    pub fn homogeneous(basis: &ExteriorBasis, alpha: &Form, k: &HVector) -> Result<Self> {
        if alpha.dim2n() != basis.dim2n() {
            return Err(Error::DimensionMismatch { expected: basis.dim2n(), found: alpha.dim2n() });
        }
        let mut out = Self::zero(basis, k.space());
        let off = basis.offset(alpha.degree());
        for (p, &c) in alpha.coeffs().iter().enumerate() {
            out.components.set_column(off + p, &(k.coeffs() * c));
        }
        Ok(out)
    }

    pub fn space(&self) -> HermiteSpace {
        self.space
    }

    pub fn components(&self) -> &CMatrix {
        &self.components
    }

    /// The `H_N`-component at global (degree-major) form position `i`.
    pub fn component(&self, i: usize) -> HVector {
        HVector::new(self.space, self.components.column(i).into_owned()).expect("column sized by space")
    }

    pub fn scale(&self, r: Complex64) -> Self {
        ModuleElement { space: self.space, components: self.components.map(|x| x * r) }
    }

    pub fn add(&self, other: &Self) -> Self {
        ModuleElement { space: self.space, components: &self.components + &other.components }
    }

    pub fn sub(&self, other: &Self) -> Self {
        ModuleElement { space: self.space, components: &self.components - &other.components }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| *c == linalg::ZERO)
    }
}

/// An `A`-linear endomorphism `F ⊗ Id_{H_N}` of `C•_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleMorphism {
    form_part: CMatrix,
}

impl ModuleMorphism {
    pub fn new(basis: &ExteriorBasis, form_part: CMatrix) -> Result<Self> {
        let n = basis.total();
        if form_part.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n * n, found: form_part.len() });
        }
        Ok(ModuleMorphism { form_part })
    }

    pub fn identity(basis: &ExteriorBasis) -> Self {
        let n = basis.total();
        ModuleMorphism { form_part: CMatrix::identity(n, n) }
    }

    pub fn zero(basis: &ExteriorBasis) -> Self {
        let n = basis.total();
        ModuleMorphism { form_part: CMatrix::zeros(n, n) }
    }

    pub fn form_part(&self) -> &CMatrix {
        &self.form_part
    }

    pub fn apply(&self, u: &ModuleElement) -> ModuleElement {
        ModuleElement { space: u.space, components: &u.components * self.form_part.transpose() }
    }
}

/// Residual of one identity over all samples of an [`OscillatoryModule::axiom_suite`] run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub seed: u64,
    pub samples: usize,
    pub identities: Vec<IdentityResidual>,
}

impl AxiomReport {
    pub fn max_residual(&self) -> f64 {
        self.identities.iter().map(|r| r.max_residual).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.identities.iter().find(|r| r.name == name).map(|r| r.max_residual)
    }
}

/// Coefficients `a_I` with `Σ a_I.(U_I ⊗ e_0) = u`.
#[derive(Clone, Debug)]
pub struct GenerationSolution {
    pub coefficients: Vec<AlgebraElement>,
    pub residual: f64,
}

/// Kernel and adjoint-image of a morphism at the form-coordinate level.
#[derive(Clone, Debug)]
pub struct MishchenkoSplit {
    /// Columns form a `g`-orthonormal basis of `Ker F`.
    pub kernel: CMatrix,
    /// Columns form a `g`-orthonormal basis of `Im F*`.
    pub image_adjoint: CMatrix,
    /// Worst module-norm defect of `u − (P_ker u + P_im u)`, relative to `|u|`.
    pub reconstruction_residual: f64,
    /// Worst `|(P_ker u, P_im v)|_A`, relative to `|u| |v|`.
    pub orthogonality_residual: f64,
}

impl MishchenkoSplit {
    pub fn dims(&self) -> (usize, usize) {
        (self.kernel.ncols(), self.image_adjoint.ncols())
    }
}

/// `C•_N` for fixed `2n`, `H_N` and metric.
#[derive(Clone, Debug)]
pub struct OscillatoryModule {
    basis: ExteriorBasis,
    space: HermiteSpace,
    metric: Metric,
    gram: DMatrix<f64>,
    gram_c: CMatrix,
}

impl OscillatoryModule {
    pub fn new(dim2n: usize, space: HermiteSpace, metric: Metric) -> Result<Self> {
        let basis = ExteriorBasis::new(dim2n)?;
        if metric.dim() != dim2n {
            return Err(Error::DimensionMismatch { expected: dim2n, found: metric.dim() });
        }
        let gram = metric.full_form_gram(&basis);
        let gram_c = linalg::real_to_complex(&gram);
        Ok(OscillatoryModule { basis, space, metric, gram, gram_c })
    }

    pub fn basis(&self) -> &ExteriorBasis {
        &self.basis
    }

    pub fn space(&self) -> HermiteSpace {
        self.space
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    /// Gram matrix of the form metric on the whole exterior algebra.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn zero(&self) -> ModuleElement {
        ModuleElement::zero(&self.basis, self.space)
    }

    pub fn random_element(&self, sampler: &mut Sampler) -> ModuleElement {
        let c = sampler.cmatrix(self.space.dim(), self.basis.total());
        ModuleElement { space: self.space, components: c }
    }

    fn check(&self, u: &ModuleElement) -> Result<()> {
        if u.components.shape() != (self.space.dim(), self.basis.total()) {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim() * self.basis.total(),
                found: u.components.len(),
            });
        }
        Ok(())
    }

    /// `a.(α ⊗ k) = α ⊗ a(k)`, extended linearly.
    pub fn a_action(&self, a: &AlgebraElement, u: &ModuleElement) -> Result<ModuleElement> {
        self.check(u)?;
        if a.dim() != self.space.dim() {
            return Err(Error::DimensionMismatch { expected: self.space.dim(), found: a.dim() });
        }
        Ok(ModuleElement { space: u.space, components: a.matrix() * &u.components })
    }

    /// `(α ⊗ k, β ⊗ l) = g(α, β) k ⊗ l*`, extended linearly in the first slot
    /// and conjugate-linearly in the second.
    pub fn a_product(&self, u: &ModuleElement, v: &ModuleElement) -> Result<AlgebraElement> {
        self.check(u)?;
        self.check(v)?;
        Ok(AlgebraElement::from_matrix(&u.components * &self.gram_c * v.components.adjoint()))
    }

    /// `|u| = sqrt(|(u, u)|_A)`.
    pub fn module_norm(&self, u: &ModuleElement) -> Result<f64> {
        Ok(cstar::op_norm(&self.a_product(u, u)?).sqrt())
    }

    /// Evaluates the identities satisfied by [`a_product`](Self::a_product) on
    /// `samples` random draws and reports the worst relative residual of each.
    pub fn axiom_suite(&self, seed: u64, samples: usize) -> Result<AxiomReport> {
        if samples == 0 {
            return Err(Error::Config("axiom suite needs at least one sample".into()));
        }
        let dim = self.space.dim();
        let mut sampler = Sampler::new(seed);
        // draw everything up front so evaluation order cannot change the stream
        let draws: Vec<_> = (0..samples)
            .map(|_| {
                let a = sampler.algebra_element(dim);
                let u = self.random_element(&mut sampler);
                let v = self.random_element(&mut sampler);
                let r = sampler.complex();
                (a, u, v, r)
            })
            .collect();
        let min_gram_ev = nalgebra::SymmetricEigen::new(self.gram.clone()).eigenvalues.min();

        let per_sample: Vec<[f64; 6]> = draws
            .par_iter()
            .map(|(a, u, v, r)| self.sample_residuals(a, u, v, *r, min_gram_ev))
            .collect::<Result<_>>()?;
        let names = [
            "left A-linearity (a.u, v) = a (u, v)",
            "right A-compatibility (u, a.v) = (u, v) a*",
            "scalar linearity (r u, v) = r (u, v)",
            "hermitian symmetry (u, v)* = (v, u)",
            "positivity (u, u) >= 0",
            "nondegeneracy tr (u, u) >= min eig(G) |u|_2^2",
        ];
        let identities = names
            .iter()
            .enumerate()
            .map(|(i, name)| IdentityResidual {
                name,
                max_residual: per_sample.iter().map(|s| s[i]).fold(0.0, f64::max),
            })
            .collect();
        Ok(AxiomReport { seed, samples, identities })
    }

    fn sample_residuals(
        &self,
        a: &AlgebraElement,
        u: &ModuleElement,
        v: &ModuleElement,
        r: Complex64,
        min_gram_ev: f64,
    ) -> Result<[f64; 6]> {
        let rel = |x: &AlgebraElement, y: &AlgebraElement| {
            let scale = x.matrix().norm().max(y.matrix().norm());
            linalg::rel_residual((x.matrix() - y.matrix()).norm(), scale)
        };
        let uv = self.a_product(u, v)?;
        let left = rel(&self.a_product(&self.a_action(a, u)?, v)?, &(a * &uv));
        let right = rel(&self.a_product(u, &self.a_action(a, v)?)?, &(&uv * &cstar::star(a)));
        let scalar = rel(&self.a_product(&u.scale(r), v)?, &uv.scale(r));
        let symmetric = rel(&cstar::star(&uv), &self.a_product(v, u)?);
        let uu = self.a_product(u, u)?;
        let w = cstar::is_positive(&uu, 1e-12);
        let positivity = linalg::rel_residual(
            w.hermitian_defect.max((-w.min_eigenvalue).max(0.0)),
            w.scale,
        );
        let sq = u.components.norm_squared();
        let nondegeneracy = linalg::rel_residual((min_gram_ev * sq - uu.trace().re).max(0.0), sq);
        Ok([left, right, scalar, symmetric, positivity, nondegeneracy])
    }

    /// `U_I ⊗ e_0` for every basis form, degree-major.
    pub fn generators(&self) -> Vec<ModuleElement> {
        (0..self.basis.total())
            .map(|i| {
                let mut c = CMatrix::zeros(self.space.dim(), self.basis.total());
                c[(0, i)] = ONE;
                ModuleElement { space: self.space, components: c }
            })
            .collect()
    }

    /// `a_I = c_I(u) ⊗ e_0*`, so that `a_I(e_0) = c_I(u)`.
    pub fn generation_solve(&self, u: &ModuleElement) -> Result<GenerationSolution> {
        self.check(u)?;
        let e0 = HVector::basis(self.space, 0);
        let coefficients: Vec<AlgebraElement> = (0..self.basis.total())
            .map(|i| cstar::rank_one(&u.component(i), &e0))
            .collect::<Result<_>>()?;
        let mut rebuilt = self.zero();
        for (a, gen) in coefficients.iter().zip(self.generators()) {
            rebuilt = rebuilt.add(&self.a_action(a, &gen)?);
        }
        let residual = self.module_norm(&u.sub(&rebuilt))?;
        Ok(GenerationSolution { coefficients, residual })
    }

    /// The adjoint with respect to the `A`-product: `G⁻¹ Fᴴ G`.
    pub fn morphism_adjoint(&self, b: &ModuleMorphism) -> ModuleMorphism {
        let ginv = self.gram.clone().try_inverse().expect("Gram matrix of a metric is invertible");
        let form_part = linalg::real_to_complex(&ginv) * b.form_part.adjoint() * &self.gram_c;
        ModuleMorphism { form_part }
    }

    /// `|(Bu, v) − (u, B*v)|` relative to `|B| |u| |v|`, worst over `samples` draws.
    pub fn adjoint_residual(
        &self,
        b: &ModuleMorphism,
        b_adj: &ModuleMorphism,
        sampler: &mut Sampler,
        samples: usize,
    ) -> Result<f64> {
        let scale_b = linalg::op_norm(&b.form_part).max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let u = self.random_element(sampler);
            let v = self.random_element(sampler);
            let lhs = self.a_product(&b.apply(&u), &v)?;
            let rhs = self.a_product(&u, &b_adj.apply(&v))?;
            let scale = scale_b * self.module_norm(&u)? * self.module_norm(&v)?;
            worst = worst.max(linalg::rel_residual((lhs.matrix() - rhs.matrix()).norm(), scale));
        }
        Ok(worst)
    }

    /// `g`-orthonormalises the columns of `q` (assumed independent).
    fn g_orthonormalize(&self, q: &CMatrix) -> CMatrix {
        if q.ncols() == 0 {
            return q.clone();
        }
        let h = q.adjoint() * &self.gram_c * q;
        let h = (&h + h.adjoint()).scale(0.5);
        let l = h.cholesky().expect("independent columns give a positive Gram matrix").l();
        let l_inv_h = l.adjoint().try_inverse().expect("cholesky factor is invertible");
        q * l_inv_h
    }

    /// `g`-orthogonal projector `Q Qᴴ G` onto the span of `g`-orthonormal columns.
    fn projector(&self, q: &CMatrix) -> CMatrix {
        q * q.adjoint() * &self.gram_c
    }

    /// Splits `C•_N = Ker B ⊕ Im B*` and measures reconstruction and
    /// `A`-orthogonality on `samples` random elements.
    pub fn mishchenko_split(
        &self,
        b: &ModuleMorphism,
        tol: f64,
        sampler: &mut Sampler,
        samples: usize,
    ) -> Result<MishchenkoSplit> {
        let b_adj = self.morphism_adjoint(b);
        let kernel = self.g_orthonormalize(&linalg::null_space(&b.form_part, tol));
        let image_adjoint = self.g_orthonormalize(&linalg::column_space(&b_adj.form_part, tol));
        let p_ker = ModuleMorphism { form_part: self.projector(&kernel) };
        let p_im = ModuleMorphism { form_part: self.projector(&image_adjoint) };

        let mut reconstruction_residual: f64 = 0.0;
        let mut orthogonality_residual: f64 = 0.0;
        for _ in 0..samples {
            let u = self.random_element(sampler);
            let v = self.random_element(sampler);
            let nu = self.module_norm(&u)?;
            let nv = self.module_norm(&v)?;
            let rebuilt = p_ker.apply(&u).add(&p_im.apply(&u));
            reconstruction_residual =
                reconstruction_residual.max(linalg::rel_residual(self.module_norm(&u.sub(&rebuilt))?, nu));
            let cross = self.a_product(&p_ker.apply(&u), &p_im.apply(&v))?;
            orthogonality_residual =
                orthogonality_residual.max(linalg::rel_residual(cstar::op_norm(&cross), nu * nv));
        }
        Ok(MishchenkoSplit { kernel, image_adjoint, reconstruction_residual, orthogonality_residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{ext_full, interior_full, sharp, Covector};

    fn module(dim2n: usize, cutoff: usize) -> OscillatoryModule {
        OscillatoryModule::new(dim2n, HermiteSpace::new(dim2n / 2, cutoff), Metric::identity(dim2n)).unwrap()
    }

    fn dx(m: &OscillatoryModule, i: usize) -> Form {
        Form::monomial(m.basis(), &[i]).unwrap()
    }

    #[test]
    fn action_examples() {
        let m = module(2, 4);
        let mut s = Sampler::new(1);
        let u = m.random_element(&mut s);
        assert_eq!(m.a_action(&AlgebraElement::identity(4), &u).unwrap(), u);

        let e0 = HVector::basis(m.space(), 0);
        let e1 = HVector::basis(m.space(), 1);
        let a = cstar::rank_one(&e1, &e0).unwrap();
        let x = ModuleElement::homogeneous(m.basis(), &dx(&m, 1), &e0).unwrap();
        let expected = ModuleElement::homogeneous(m.basis(), &dx(&m, 1), &e1).unwrap();
        assert_eq!(m.a_action(&a, &x).unwrap(), expected);

        let a = s.algebra_element(4);
        let b = s.algebra_element(4);
        let lhs = m.a_action(&(&a * &b), &u).unwrap();
        let rhs = m.a_action(&a, &m.a_action(&b, &u).unwrap()).unwrap();
        assert!((lhs.components() - rhs.components()).norm() < 1e-11);
    }

    #[test]
    fn product_examples() {
        let m = module(2, 4);
        let mut s = Sampler::new(2);
        let k = s.hvector(m.space());
        let l = s.hvector(m.space());
        let x = ModuleElement::homogeneous(m.basis(), &dx(&m, 1), &k).unwrap();
        let y = ModuleElement::homogeneous(m.basis(), &dx(&m, 1), &l).unwrap();
        let z = ModuleElement::homogeneous(m.basis(), &dx(&m, 2), &l).unwrap();
        let p = m.a_product(&x, &y).unwrap();
        assert!((p.matrix() - cstar::rank_one(&k, &l).unwrap().matrix()).norm() < 1e-12);
        assert_eq!(cstar::op_norm(&m.a_product(&x, &z).unwrap()), 0.0);

        let u = x.add(&z);
        let expected = &cstar::rank_one(&k, &k).unwrap() + &cstar::rank_one(&l, &l).unwrap();
        assert!((m.a_product(&u, &u).unwrap().matrix() - expected.matrix()).norm() < 1e-12);
    }

    #[test]
    fn norm_examples() {
        let m = module(2, 4);
        let mut s = Sampler::new(3);
        let k = s.hvector(m.space());
        let x = ModuleElement::homogeneous(m.basis(), &dx(&m, 1), &k).unwrap();
        assert!((m.module_norm(&x).unwrap() - k.norm()).abs() < 1e-12);
        assert_eq!(m.module_norm(&m.zero()).unwrap(), 0.0);
        let u = m.random_element(&mut s);
        let r = Complex64::new(-0.7, 1.9);
        let lhs = m.module_norm(&u.scale(r)).unwrap();
        assert!((lhs - r.norm() * m.module_norm(&u).unwrap()).abs() < 1e-12 * lhs);
    }

    #[test]
    fn axiom_suite_passes() {
        let m = module(2, 4);
        let rep = m.axiom_suite(1, 100).unwrap();
        assert_eq!(rep.identities.len(), 6);
        assert!(rep.max_residual() < 1e-10, "{rep:?}");
        assert!(m.axiom_suite(1, 0).is_err());
    }

    #[test]
    fn axiom_suite_with_general_metric() {
        let mut s = Sampler::new(44);
        let g = s.metric(2);
        let m = OscillatoryModule::new(2, HermiteSpace::new(1, 3), g).unwrap();
        assert!(m.axiom_suite(5, 30).unwrap().max_residual() < 1e-10);
    }

    #[test]
    fn zero_and_identity_cases() {
        let m = module(2, 4);
        let z = m.zero();
        let zz = m.a_product(&z, &z).unwrap();
        assert_eq!(zz.matrix().norm(), 0.0);
        assert!(cstar::is_positive(&zz, 1e-12).positive);
        let mut s = Sampler::new(4);
        let u = m.random_element(&mut s);
        let v = m.random_element(&mut s);
        let id = AlgebraElement::identity(4);
        assert_eq!(m.a_product(&m.a_action(&id, &u).unwrap(), &v).unwrap(), m.a_product(&u, &v).unwrap());
    }

    #[test]
    fn generator_examples() {
        let m = module(2, 3);
        let gens = m.generators();
        assert_eq!(gens.len(), 4);
        for (i, a) in gens.iter().enumerate() {
            assert!((m.module_norm(a).unwrap() - 1.0).abs() < 1e-14);
            for b in gens.iter().skip(i + 1) {
                assert_eq!(cstar::op_norm(&m.a_product(a, b).unwrap()), 0.0);
            }
        }
    }

    #[test]
    fn generation_solve_examples() {
        let m = module(2, 4);
        let mut s = Sampler::new(5);
        let v = s.hvector(m.space());
        let u = ModuleElement::homogeneous(m.basis(), &dx(&m, 1), &v).unwrap();
        let sol = m.generation_solve(&u).unwrap();
        assert_eq!(sol.residual, 0.0);
        let e0 = HVector::basis(m.space(), 0);
        let pos = m.basis().offset(1);
        assert_eq!(sol.coefficients[pos], cstar::rank_one(&v, &e0).unwrap());
        assert!(cstar::op_norm(&sol.coefficients[pos]) <= v.norm() * (1.0 + 1e-14));
        for (i, c) in sol.coefficients.iter().enumerate() {
            if i != pos {
                assert_eq!(c.matrix().norm(), 0.0);
            }
        }
        let zero = m.generation_solve(&m.zero()).unwrap();
        assert!(zero.coefficients.iter().all(|c| c.matrix().norm() == 0.0));
        let r = m.generation_solve(&m.random_element(&mut s)).unwrap();
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn adjoint_examples() {
        let m = module(2, 3);
        let id = ModuleMorphism::identity(m.basis());
        assert!((m.morphism_adjoint(&id).form_part() - id.form_part()).norm() < 1e-14);

        let mut s = Sampler::new(6);
        let g = s.metric(2);
        let mg = OscillatoryModule::new(2, HermiteSpace::new(1, 3), g.clone()).unwrap();
        let xi = s.covector(2);
        let b = ModuleMorphism::new(mg.basis(), ext_full(mg.basis(), &xi)).unwrap();
        let b_adj = mg.morphism_adjoint(&b);
        let iota = interior_full(mg.basis(), &sharp(&xi, &g).unwrap());
        assert!((b_adj.form_part() - &iota).norm() < 1e-12 * iota.norm());
        assert!(mg.adjoint_residual(&b, &b_adj, &mut s, 5).unwrap() < 1e-12);

        let f = ModuleMorphism::new(mg.basis(), s.cmatrix(4, 4)).unwrap();
        let back = mg.morphism_adjoint(&mg.morphism_adjoint(&f));
        assert!((back.form_part() - f.form_part()).norm() < 1e-12 * f.form_part().norm());
    }

    #[test]
    fn mishchenko_examples() {
        let m = module(2, 3);
        let mut s = Sampler::new(7);
        let zero = m.mishchenko_split(&ModuleMorphism::zero(m.basis()), 1e-8, &mut s, 5).unwrap();
        assert_eq!(zero.dims(), (4, 0));
        let id = m.mishchenko_split(&ModuleMorphism::identity(m.basis()), 1e-8, &mut s, 5).unwrap();
        assert_eq!(id.dims(), (0, 4));
        let xi = Covector::new(vec![0.3, -1.1]);
        let b = ModuleMorphism::new(m.basis(), ext_full(m.basis(), &xi)).unwrap();
        let split = m.mishchenko_split(&b, 1e-8, &mut s, 10).unwrap();
        let (k, i) = split.dims();
        assert_eq!(k + i, 4);
        assert_eq!(k, 2);
        assert!(split.reconstruction_residual < 1e-10);
        assert!(split.orthogonality_residual < 1e-10);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let m = module(2, 3);
        let other = module(2, 4);
        let mut s = Sampler::new(8);
        let u = other.random_element(&mut s);
        assert!(m.a_product(&u, &u).is_err());
        assert!(m.a_action(&AlgebraElement::identity(4), &m.zero()).is_err());
    }
}
