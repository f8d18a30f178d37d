//! Finite-truncation laboratory for the oscillatory Hilbert C*-module and the
//! de Rham complex twisted by the oscillator representation on a flat
//! symplectic torus.
//!
//! * [`exterior`]: exterior algebra of `V*`, contractions, metric extension.
//! * [`cstar`]: the truncated C*-algebra `A_N = End(H_N)`.
//! * [`hilbert`]: `C•_N = ⋀•V* ⊗ H_N` as a Hilbert `A_N`-module.
//! * [`oscillator`]: Hermite ladders and the `sp(2n)` action on `H_N`.
//! * [`derham`]: Fourier-truncated twisted de Rham complex, Laplacians, symbols.
//! * [`report`]: declarative experiment runner and JSON reports.

pub mod cstar;
pub mod derham;
pub mod error;
pub mod exterior;
pub mod hilbert;
pub mod linalg;
pub mod matrix_io;
pub mod oscillator;
pub mod report;
pub mod sample;

pub use cstar::{AlgebraElement, HVector, HermiteSpace};
pub use derham::{ComplexAssembly, ConnectionSpec, FourierSection, TorusModel};
pub use error::{Error, Result};
pub use exterior::{Covector, ExteriorBasis, Form, FormBasisIndex, Metric, Vector};
pub use hilbert::{ModuleElement, ModuleMorphism, OscillatoryModule};
pub use oscillator::{LadderSet, SpElement};
pub use report::{ExperimentConfig, Report};
pub use sample::Sampler;
