//! The de Rham complex on the flat torus `T^{2n} = R^{2n}/Z^{2n}` twisted by
//! the truncated oscillator space.
//!
//! Sections of `⋀^k T*T ⊗ H_N` are expanded in Fourier modes `e^{2πi m·x}`
//! with `|m|_∞ ≤ M`. A constant connection `∇ = d + Σ_a dx^a ⊗ A_a` makes
//!
//! `d^∇ (c dx^I) = Σ_a dx^a ∧ dx^I ⊗ (∂_a + A_a) c`
//!
//! block-diagonal over modes, with the block at `m` equal to
//! `Σ_a ext_{dx^a} ⊗ (2πi m_a + A_a)`. Coordinates inside a block are
//! form-major, Hermite-minor. Torus volume is normalised to one, so modes are
//! orthonormal.

mod blocks;
mod sections;
mod spectral;
mod symbol;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cstar::HermiteSpace;
use crate::error::{Error, Result};
use crate::exterior::{self, Covector, ExteriorBasis, Metric};
use crate::linalg::{self, CMatrix, I};
use crate::oscillator::{self, LadderSet, SpElement};

pub use blocks::BlockDiagonal;
pub use sections::{section_a_product, sobolev_gram, sobolev_norm_sq, sobolev_weight, FourierSection};
pub use spectral::{
    cohomology_rank, harmonic_rank, laplacian, ComplexAssembly, HarmonicReport, KERNEL_REL_TOL,
};
pub use symbol::{symbol_report, SymbolReport, SymbolSample};

/// Flatness tolerance for `[Γ_a, Γ_b] = 0`.
pub const FLATNESS_TOL: f64 = 1e-12;

/// Flat torus with constant metric and the standard symplectic form.
#[derive(Clone, Debug)]
pub struct TorusModel {
    dim2n: usize,
    fourier_cutoff: usize,
    basis: ExteriorBasis,
    metric: Metric,
    symplectic: DMatrix<f64>,
    ladders: LadderSet,
    modes: Vec<Vec<i64>>,
    // ext_{dx^a} from degree k, indexed [k][a]
    ext_dirs: Vec<Vec<CMatrix>>,
}

impl TorusModel {
    pub fn new(dim2n: usize, fourier_cutoff: usize, hermite_cutoff: usize) -> Result<Self> {
        Self::with_metric(dim2n, fourier_cutoff, hermite_cutoff, Metric::identity(dim2n))
    }

    pub fn with_metric(dim2n: usize, fourier_cutoff: usize, hermite_cutoff: usize, metric: Metric) -> Result<Self> {
        let basis = ExteriorBasis::new(dim2n)?;
        if metric.dim() != dim2n {
            return Err(Error::DimensionMismatch { expected: dim2n, found: metric.dim() });
        }
        let ladders = oscillator::ladder_matrices(dim2n / 2, hermite_cutoff)?;
        let m = fourier_cutoff as i64;
        let side = 2 * fourier_cutoff + 1;
        let count = side.pow(dim2n as u32);
        let modes = (0..count)
            .map(|mut flat| {
                let mut mode = vec![0i64; dim2n];
                for slot in mode.iter_mut().rev() {
                    *slot = (flat % side) as i64 - m;
                    flat /= side;
                }
                mode
            })
            .collect();
        let ext_dirs = (0..=dim2n)
            .map(|k| {
                (1..=dim2n).map(|a| exterior::ext_matrix(&basis, &Covector::basis(dim2n, a), k)).collect()
            })
            .collect();
        Ok(TorusModel {
            dim2n,
            fourier_cutoff,
            basis,
            metric,
            symplectic: oscillator::standard_symplectic(dim2n),
            ladders,
            modes,
            ext_dirs,
        })
    }

    pub fn dim2n(&self) -> usize {
        self.dim2n
    }

    pub fn fourier_cutoff(&self) -> usize {
        self.fourier_cutoff
    }

    pub fn basis(&self) -> &ExteriorBasis {
        &self.basis
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn symplectic(&self) -> &DMatrix<f64> {
        &self.symplectic
    }

    pub fn ladders(&self) -> &LadderSet {
        &self.ladders
    }

    pub fn space(&self) -> HermiteSpace {
        self.ladders.space()
    }

    /// Fourier modes, lexicographic with the first coordinate most significant.
    pub fn modes(&self) -> &[Vec<i64>] {
        &self.modes
    }

    pub fn mode_index(&self, mode: &[i64]) -> Option<usize> {
        if mode.len() != self.dim2n {
            return None;
        }
        let m = self.fourier_cutoff as i64;
        let side = 2 * m + 1;
        let mut idx = 0i64;
        for &c in mode {
            if c.abs() > m {
                return None;
            }
            idx = idx * side + (c + m);
        }
        Some(idx as usize)
    }

    /// Dimension of one mode block in degree `k`: `C(2n, k) · N^n`.
    pub fn block_dim(&self, k: usize) -> usize {
        self.basis.len(k) * self.space().dim()
    }

    /// Total dimension of truncated degree-`k` sections.
    pub fn section_dim(&self, k: usize) -> usize {
        self.modes.len() * self.block_dim(k)
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if k > self.dim2n {
            return Err(Error::DegreeOutOfRange { degree: k, dim: self.dim2n });
        }
        Ok(())
    }

    pub(crate) fn ext_dir(&self, k: usize, a: usize) -> &CMatrix {
        &self.ext_dirs[k][a]
    }
}

/// A constant flat connection on the trivial oscillator bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConnectionSpec {
    Trivial,
    /// `A_a = i c_a · Id`: a flat line-bundle twist with holonomy `e^{i c_a}`.
    LineTwist { c: Vec<f64> },
    /// `A_a = ρ′(Γ_a)` for pairwise commuting `Γ_a ∈ sp(2n)`.
    RepTwist { generators: Vec<SpElement> },
}

impl ConnectionSpec {
    /// Checks shapes and, for `RepTwist`, that the generators commute.
    pub fn validate(&self, dim2n: usize) -> Result<()> {
        match self {
            ConnectionSpec::Trivial => Ok(()),
            ConnectionSpec::LineTwist { c } => {
                if c.len() != dim2n {
                    return Err(Error::InvalidConnection(format!("line twist needs {dim2n} entries, got {}", c.len())));
                }
                if !c.iter().all(|x| x.is_finite()) {
                    return Err(Error::InvalidConnection("non-finite twist".into()));
                }
                Ok(())
            }
            ConnectionSpec::RepTwist { generators } => {
                if generators.len() != dim2n {
                    return Err(Error::InvalidConnection(format!(
                        "rep twist needs {dim2n} generators, got {}",
                        generators.len()
                    )));
                }
                if let Some(g) = generators.iter().find(|g| g.dim2n() != dim2n) {
                    return Err(Error::InvalidConnection(format!("generator of size {}", g.dim2n())));
                }
                for (a, ga) in generators.iter().enumerate() {
                    for gb in &generators[a + 1..] {
                        let defect = ga.bracket(gb).matrix().norm();
                        let scale = ga.matrix().norm().max(gb.matrix().norm()).max(1.0);
                        if defect > FLATNESS_TOL * scale {
                            return Err(Error::InvalidConnection(format!(
                                "generators do not commute (defect {defect:.3e})"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Whether `d^∇` commutes with the fiberwise `A`-action.
    pub fn is_a_linear(&self) -> bool {
        !matches!(self, ConnectionSpec::RepTwist { .. })
    }
}

/// Connection coefficients `A_a` on `H_N`, one per torus direction.
pub fn connection_fields(spec: &ConnectionSpec, model: &TorusModel) -> Result<Vec<CMatrix>> {
    let dim = model.space().dim();
    let n = model.dim2n;
    match spec {
        ConnectionSpec::Trivial => Ok(vec![CMatrix::zeros(dim, dim); n]),
        ConnectionSpec::LineTwist { c } => {
            if c.len() != n {
                return Err(Error::InvalidConnection(format!("line twist needs {n} entries")));
            }
            Ok(c.iter().map(|&ca| CMatrix::identity(dim, dim).map(|x| x * I * ca)).collect())
        }
        ConnectionSpec::RepTwist { generators } => generators
            .iter()
            .map(|g| oscillator::quantize(g, &model.ladders).map(|r| r.into_matrix()))
            .collect(),
    }
}

/// Curvature of a constant connection: `max_{a<b} |[A_a, A_b]|` on the
/// interior Hermite block. Works on unvalidated specs.
pub fn curvature_norm(spec: &ConnectionSpec, model: &TorusModel) -> Result<f64> {
    if !matches!(spec, ConnectionSpec::RepTwist { .. }) {
        return Ok(0.0);
    }
    let fields = connection_fields(spec, model)?;
    let mut worst: f64 = 0.0;
    for a in 0..fields.len() {
        for b in a + 1..fields.len() {
            let c = linalg::commutator(&fields[a], &fields[b]);
            worst = worst.max(oscillator::interior_norm(&c, &model.ladders));
        }
    }
    Ok(worst)
}

fn mode_block(model: &TorusModel, k: usize, mode: &[i64], fields: &[CMatrix]) -> CMatrix {
    let h = model.space().dim();
    let mut block = CMatrix::zeros(model.block_dim(k + 1), model.block_dim(k));
    for a in 0..model.dim2n {
        let ext = model.ext_dir(k, a);
        if ext.nrows() == 0 {
            continue;
        }
        let coeff = Complex64::new(0.0, 2.0 * PI * mode[a] as f64);
        let fibre = CMatrix::identity(h, h).map(|x| x * coeff) + &fields[a];
        block += linalg::kron(ext, &fibre);
    }
    block
}

/// `d_k^∇` as a block-diagonal matrix over Fourier modes.
pub fn d_nabla(k: usize, spec: &ConnectionSpec, model: &TorusModel) -> Result<BlockDiagonal> {
    model.check_degree(k)?;
    spec.validate(model.dim2n)?;
    let fields = connection_fields(spec, model)?;
    let blocks = model.modes.par_iter().map(|m| mode_block(model, k, m, &fields)).collect();
    Ok(BlockDiagonal::new(blocks))
}

/// The untwisted exterior derivative `d_k ⊗ Id`.
pub fn exterior_derivative(k: usize, model: &TorusModel) -> Result<BlockDiagonal> {
    d_nabla(k, &ConnectionSpec::Trivial, model)
}

/// `|d_{k+1}^∇ d_k^∇|` (largest singular value over blocks).
pub fn d_squared_defect(k: usize, spec: &ConnectionSpec, model: &TorusModel) -> Result<f64> {
    if k + 1 > model.dim2n {
        return Ok(0.0);
    }
    Ok(d_nabla(k + 1, spec, model)?.mul(&d_nabla(k, spec, model)?).op_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::Sampler;

    fn model() -> TorusModel {
        TorusModel::new(2, 2, 2).unwrap()
    }

    #[test]
    fn mode_layout() {
        let m = model();
        assert_eq!(m.modes().len(), 25);
        assert_eq!(m.modes()[0], vec![-2, -2]);
        assert_eq!(m.mode_index(&[0, 0]), Some(12));
        assert_eq!(m.mode_index(&[1, 0]), Some(17));
        assert_eq!(m.mode_index(&[3, 0]), None);
        for (i, mode) in m.modes().iter().enumerate() {
            assert_eq!(m.mode_index(mode), Some(i));
        }
        assert_eq!(m.section_dim(1), 25 * 2 * 2);
    }

    #[test]
    fn exterior_derivative_examples() {
        let m = model();
        let d0 = exterior_derivative(0, &m).unwrap();
        let zero = m.mode_index(&[0, 0]).unwrap();
        assert_eq!(d0.block(zero).norm(), 0.0);
        let e1 = m.mode_index(&[1, 0]).unwrap();
        // block rows: (dx1, h0), (dx1, h1), (dx2, h0), (dx2, h1)
        let b = d0.block(e1);
        let tau = Complex64::new(0.0, 2.0 * PI);
        assert_eq!(b[(0, 0)], tau);
        assert_eq!(b[(1, 1)], tau);
        assert_eq!(b[(2, 0)], linalg::ZERO);
        for k in 0..2 {
            assert_eq!(d_squared_defect(k, &ConnectionSpec::Trivial, &m).unwrap(), 0.0);
        }
        assert!(exterior_derivative(3, &m).is_err());
        assert_eq!(exterior_derivative(2, &m).unwrap().nrows(), 0);
    }

    #[test]
    fn line_twist_block() {
        let m = model();
        let c = vec![0.3, -1.1];
        let spec = ConnectionSpec::LineTwist { c: c.clone() };
        let d0 = d_nabla(0, &spec, &m).unwrap();
        let idx = m.mode_index(&[1, -2]).unwrap();
        let b = d0.block(idx);
        let expect = |a: usize, ma: f64| Complex64::new(0.0, 2.0 * PI * ma + c[a]);
        assert!((b[(0, 0)] - expect(0, 1.0)).norm() < 1e-14);
        assert!((b[(2, 0)] - expect(1, -2.0)).norm() < 1e-14);
        assert!(d_squared_defect(0, &spec, &m).unwrap() < 1e-10);
    }

    #[test]
    fn rep_twist_flatness() {
        let m = TorusModel::new(2, 1, 8).unwrap();
        let mut s = Sampler::new(21);
        let g1 = s.sp_element(2);
        let flat = ConnectionSpec::RepTwist { generators: vec![g1.clone(), g1.scale(2.0)] };
        assert!(flat.validate(2).is_ok());
        assert!(curvature_norm(&flat, &m).unwrap() < 1e-10);
        assert!(d_squared_defect(0, &flat, &m).unwrap() < 1e-10);

        let (h, e, _) = oscillator::sl2_triple();
        let curved = ConnectionSpec::RepTwist { generators: vec![h, e] };
        assert!(matches!(curved.validate(2), Err(Error::InvalidConnection(_))));
        assert!(curvature_norm(&curved, &m).unwrap() > 0.1);
        assert!(d_nabla(0, &curved, &m).is_err());
        assert_eq!(curvature_norm(&ConnectionSpec::Trivial, &m).unwrap(), 0.0);
    }

    #[test]
    fn connection_spec_json() {
        let spec: ConnectionSpec = serde_json::from_str(r#"{"kind":"line_twist","c":[1.0,2.0]}"#).unwrap();
        assert_eq!(spec, ConnectionSpec::LineTwist { c: vec![1.0, 2.0] });
        let t: ConnectionSpec = serde_json::from_str(r#"{"kind":"trivial"}"#).unwrap();
        assert_eq!(t, ConnectionSpec::Trivial);
        let r: ConnectionSpec =
            serde_json::from_str(r#"{"kind":"rep_twist","generators":[[[1,0],[0,-1]],[[2,0],[0,-2]]]}"#).unwrap();
        assert!(r.validate(2).is_ok());
        assert!(ConnectionSpec::LineTwist { c: vec![1.0] }.validate(2).is_err());
    }
}
