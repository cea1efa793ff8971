//! Quantum speed limits from basis-dependent weighted lp norms.
//!
//! The numerical core is generic over the real scalar (`f32` or `f64`); the
//! scenario presets and the command-line tool work in `f64`. Type aliases for
//! both precisions are exported at the crate root.

pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod haar;
pub mod matrix;
pub mod norms;
pub mod optimize;
pub mod scalar;
pub mod scenarios;
pub mod selftest;
pub mod spectral;
pub mod states;
pub mod vectorize;

pub use error::{QslError, Result};
pub use haar::haar_unitary;
pub use matrix::ComplexMatrix;
pub use norms::{arrow_norm, matched_seminorm, MatchedWeights, WeightVector};
pub use scalar::{Exponent, Real, C};
pub use spectral::{hermitian_eig, singular_values, HermitianEigen};
pub use states::{bures_angle, energy_stddev};
pub use vectorize::{devectorize, vectorize, Basis, VectorizedOperator};

pub type Matrix = ComplexMatrix<f64>;
pub type Matrix32 = ComplexMatrix<f32>;
pub type Weights = WeightVector<f64>;
pub type Weights32 = WeightVector<f32>;
pub type Vectorized = VectorizedOperator<f64>;
pub type Vectorized32 = VectorizedOperator<f32>;
