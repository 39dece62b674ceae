//! Pseudo-spectral operator calculus on the Lie algebra of exact
//! divergence-free vector fields of the flat torus `T³ = [0, 2π)³`.
//!
//! Fields are real and stored as Fourier coefficients ([`SpectralVectorField`]).
//! On top of the grid and transform plumbing the crate provides curl and its
//! inverse, the Lie bracket, the bi-invariant form `⟨X, Y⟩ = (X, curl⁻¹ Y)`,
//! Euler dynamics on the vorticity, sectional-curvature formulas and signed
//! spectral sums over the curl spectrum, plus residual evaluators that turn
//! each algebraic identity into a number that should sit at roundoff.

pub mod curvature;
pub mod dynamics;
pub mod error;
pub mod fields;
pub mod forms;
pub mod grid;
pub mod io;
pub mod operators;
pub mod suite;

pub use error::{Error, Result};
pub use fields::{HelicalCoefficients, Helicity, SpectralScalar, SpectralVectorField};
pub use grid::{GridSpec, WaveVector};
