//! Exact laboratory for a non-uniquely ergodic lamination on the
//! five-punctured sphere, built from a twist-matrix train-track cocycle.
//!
//! The core is exact: weights, intersection numbers and normalized products
//! are big integers or rationals. Log-domain reals take over where lengths
//! and balance times are modelled.

pub mod cli;
pub mod curves;
pub mod error;
pub mod lengthmodel;
pub mod measures;
pub mod numerics;
pub mod timeline;
pub mod traintrack;

pub use curves::{validate_sequence, Cocycle, CurveIndex, Parity, RSequence};
pub use error::{Error, Result};
pub use measures::{MeasureContext, MeasureVector};
pub use numerics::{BigInt, BigRational, LogReal, Matrix5, Vector5};
pub use traintrack::{IntMatrix, IntVector, RatMatrix, WeightVector};

/// Limit-measure weights and other real vectors.
pub type RealVector = Vector5<f64>;
/// Real matrices, e.g. a normalized product converted for display.
pub type RealMatrix = Matrix5<f64>;
