use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{d_nabla, BlockDiagonal, ConnectionSpec, TorusModel};
use crate::error::{Error, Result};
use crate::exterior::{self, binomial, Covector};
use crate::hilbert::{ModuleMorphism, OscillatoryModule};
use crate::linalg::{self, CMatrix, RANK_REL_TOL};
use crate::sample::Sampler;

/// Checks performed on one covector `ξ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolSample {
    pub xi: Vec<f64>,
    /// `ξ = 0`: reported, never counted in the verdict.
    pub zero_section: bool,
    pub exact: bool,
    /// Ranks of `σ_k^ξ = ext_ξ ⊗ Id` for `k = 0..2n−1`.
    pub ranks: Vec<usize>,
    /// `max_k |σ_{k+1} σ_k|`.
    pub complex_residual: f64,
    /// `|(σ^ξ)* − ι_{ξ^g} ⊗ Id| / |ι_{ξ^g}|` with the `A`-product adjoint.
    pub adjoint_residual: f64,
    /// `|(σ u, v) − (u, ι v)|` on random module elements, relative.
    pub defining_equation_residual: f64,
    /// `max_k |σ_extracted − σ_k^ξ|`, extracted from the assembled `d_k^∇`.
    pub extraction_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolReport {
    pub samples: Vec<SymbolSample>,
    /// Every nonzero sample is exact with residuals below `tol`.
    pub a_elliptic: bool,
    pub tol: f64,
}

impl SymbolReport {
    pub fn max_adjoint_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.adjoint_residual.max(s.defining_equation_residual)).fold(0.0, f64::max)
    }

    pub fn max_extraction_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.extraction_residual).fold(0.0, f64::max)
    }

    pub fn max_complex_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.complex_residual).fold(0.0, f64::max)
    }
}

/// Linear part of `m ↦ d_k^∇(m)`: `S_a = (D(e_a) − D(0)) / 2πi`, read off the
/// assembled blocks.
fn mode_derivatives(d: &BlockDiagonal, model: &TorusModel) -> Result<Vec<CMatrix>> {
    let n = model.dim2n();
    let origin = model.mode_index(&vec![0; n]).expect("origin is always a mode");
    let base = d.block(origin);
    (0..n)
        .map(|a| {
            let mut e = vec![0i64; n];
            e[a] = 1;
            let idx = model
                .mode_index(&e)
                .ok_or_else(|| Error::Config("symbol extraction needs fourier cutoff >= 1".into()))?;
            Ok((d.block(idx) - base).map(|x| x / Complex64::new(0.0, 2.0 * PI)))
        })
        .collect()
}

/// Principal-symbol checks of the twisted complex at each sampled `ξ`.
pub fn symbol_report(
    spec: &ConnectionSpec,
    model: &TorusModel,
    xi_samples: &[Covector],
    seed: u64,
    tol: f64,
) -> Result<SymbolReport> {
    let n = model.dim2n();
    let h = model.space().dim();
    let id_h = CMatrix::identity(h, h);
    let module = OscillatoryModule::new(n, model.space(), model.metric().clone())?;
    let basis = model.basis();
    let derivs: Vec<Vec<CMatrix>> =
        (0..n).map(|k| mode_derivatives(&d_nabla(k, spec, model)?, model)).collect::<Result<_>>()?;
    let mut sampler = Sampler::new(seed);

    let mut samples = Vec::with_capacity(xi_samples.len());
    for xi in xi_samples {
        if xi.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: xi.dim() });
        }
        let sigma: Vec<CMatrix> =
            (0..=n).map(|k| linalg::kron(&exterior::ext_matrix(basis, xi, k), &id_h)).collect();
        let ranks: Vec<usize> = sigma[..n].iter().map(|s| linalg::numerical_rank(s, RANK_REL_TOL)).collect();
        let rank = |k: isize| if k < 0 || k as usize >= n { 0 } else { ranks[k as usize] };
        let zero_section = xi.is_zero();
        let exact = !zero_section
            && (0..=n).all(|k| rank(k as isize) + rank(k as isize - 1) == binomial(n, k) * h)
            && (0..n).all(|k| ranks[k] == binomial(n - 1, k) * h);
        let complex_residual = (0..n).map(|k| linalg::op_norm(&(&sigma[k + 1] * &sigma[k]))).fold(0.0, f64::max);

        let b = ModuleMorphism::new(basis, exterior::ext_full(basis, xi))?;
        let b_adj = module.morphism_adjoint(&b);
        let v = exterior::sharp(xi, model.metric())?;
        let iota = ModuleMorphism::new(basis, exterior::interior_full(basis, &v))?;
        let adjoint_residual =
            linalg::rel_residual((b_adj.form_part() - iota.form_part()).norm(), iota.form_part().norm());
        let defining_equation_residual = module.adjoint_residual(&b, &iota, &mut sampler, 2)?;

        let extraction_residual = (0..n)
            .map(|k| {
                let mut extracted = CMatrix::zeros(sigma[k].nrows(), sigma[k].ncols());
                for (a, s) in derivs[k].iter().enumerate() {
                    extracted += s.scale(xi.components[a]);
                }
                linalg::rel_residual((extracted - &sigma[k]).norm(), sigma[k].norm())
            })
            .fold(0.0, f64::max);

        samples.push(SymbolSample {
            xi: xi.components.clone(),
            zero_section,
            exact,
            ranks,
            complex_residual,
            adjoint_residual,
            defining_equation_residual,
            extraction_residual,
        });
    }
    let a_elliptic = samples.iter().any(|s| !s.zero_section)
        && samples.iter().filter(|s| !s.zero_section).all(|s| {
            s.exact
                && s.complex_residual < tol
                && s.adjoint_residual < tol
                && s.defining_equation_residual < tol
                && s.extraction_residual < tol
        });
    Ok(SymbolReport { samples, a_elliptic, tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator;

    #[test]
    fn trivial_spec_is_a_elliptic() {
        let model = TorusModel::new(2, 1, 2).unwrap();
        let mut s = Sampler::new(51);
        let mut xs: Vec<Covector> = (0..20).map(|_| s.unit_covector(2)).collect();
        xs.push(Covector::new(vec![0.0, 0.0]));
        let rep = symbol_report(&ConnectionSpec::Trivial, &model, &xs, 1, 1e-10).unwrap();
        assert!(rep.a_elliptic);
        let zero = rep.samples.last().unwrap();
        assert!(zero.zero_section && !zero.exact);
        assert!(rep.max_adjoint_residual() < 1e-10);
        assert!(rep.max_extraction_residual() < 1e-12);
    }

    #[test]
    fn symbol_ignores_zeroth_order_terms() {
        let model = TorusModel::new(2, 1, 6).unwrap();
        let mut s = Sampler::new(52);
        let g = s.sp_element(2);
        let specs = [
            ConnectionSpec::LineTwist { c: vec![1.3, -0.2] },
            ConnectionSpec::RepTwist { generators: vec![g.clone(), oscillator::SpElement::zero(2)] },
        ];
        let xs: Vec<Covector> = (0..5).map(|_| s.unit_covector(2)).collect();
        for spec in &specs {
            let rep = symbol_report(spec, &model, &xs, 2, 1e-10).unwrap();
            assert!(rep.a_elliptic, "{spec:?}");
        }
    }

    #[test]
    fn needs_a_nonzero_mode() {
        let model = TorusModel::new(2, 0, 2).unwrap();
        let xs = vec![Covector::basis(2, 1)];
        assert!(symbol_report(&ConnectionSpec::Trivial, &model, &xs, 0, 1e-10).is_err());
        let model = TorusModel::new(2, 1, 2).unwrap();
        let only_zero = vec![Covector::new(vec![0.0, 0.0])];
        assert!(!symbol_report(&ConnectionSpec::Trivial, &model, &only_zero, 0, 1e-10).unwrap().a_elliptic);
    }
}
