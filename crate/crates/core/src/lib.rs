//! Heyde-type characterization of Gaussian distributions on compact abelian groups.
//!
//! Finite products of cyclic groups and tori `T^d`, their duals, endomorphisms and
//! measures; the functional equations behind the symmetry of a conditional
//! distribution of one linear form given another; and an executable
//! counterexample on `T^2` with a self-checking certificate.
//!
//! Mass functions on finite groups are generic over [`scalar::Scalar`], so the
//! same code runs in `f32`, `f64` or exact rationals.

pub mod cli;
pub mod counterexample;
pub mod dual;
pub mod endo;
pub mod error;
pub mod group;
pub mod heyde;
pub mod lattice;
pub mod measure;
pub mod scalar;
pub mod sweep;
pub mod torus;

pub use error::{Error, Result};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Probability measure with `f64` masses.
pub type Measure = measure::FiniteMeasure<f64>;
/// Probability measure with `f32` masses.
pub type Measure32 = measure::FiniteMeasure<f32>;
/// Probability measure with exact rational masses.
pub type ExactMeasure = measure::FiniteMeasure<Rational>;
