//! Exact-arithmetic construction of the rational sl₂ R-matrix, the quantum
//! Knizhnik–Zamolodchikov difference operators built from it, and checkers for
//! the algebraic identities they satisfy.
//!
//! Modules, bottom-up:
//! - [`algebra`]: rationals, polynomials, rational functions, ħ-series.
//! - [`tensor`]: dense operators on `V^{⊗n}` with leg embedding and partial transposes.
//! - [`rmatrix`]: bare and normalized R-matrices; Yang–Baxter, unitarity, crossing.
//! - [`qkz`]: the difference operators `A_i`, flatness, lattice transport.
//! - [`fusion`]: L-operators in the evaluation representation, RLL sampling,
//!   quantum determinant.
//! - [`classical`]: order-ħ² extraction of loop-algebra brackets from RLL relations.

pub mod algebra;
pub mod classical;
pub mod error;
pub mod fusion;
pub mod qkz;
pub mod report;
pub mod rmatrix;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};
