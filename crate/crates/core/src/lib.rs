//! (k, ε)-anonymisation of tabular data.
//!
//! A chosen subset of quasi identifiers (the *k-quasis*) is made k-anonymous
//! with either OLA (global recoding over a lattice of generalisation levels)
//! or Mondrian (local recoding by median splits). The remaining numeric quasi
//! identifier (the *ε-quasi*) is then perturbed with Laplace noise calibrated
//! separately inside each equivalence class, so the noise scale follows the
//! class diameter rather than the diameter of the whole column.
//!
//! The crate also evaluates the result: analytic and empirical relative
//! error, nearest-neighbour linking risk, and confidence-based suppression.
//!
//! Numeric code is generic over [`Scalar`] (implemented for `f32` and `f64`);
//! the `*F64` aliases below are what the CLI uses.

pub mod dataset;
pub mod dp;
pub mod error;
pub mod hierarchy;
pub mod kanon;
pub mod loss;
pub mod pipeline;
pub mod risk;
pub mod rng;
pub mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type DatasetF64 = dataset::Dataset<f64>;
pub type DatasetF32 = dataset::Dataset<f32>;
pub type PartitionF64 = kanon::Partition<f64>;
pub type PartitionF32 = kanon::Partition<f32>;
pub type LaplaceParamsF64 = dp::LaplaceParams<f64>;
pub type AnthropometricModelF64 = synth::AnthropometricModel<f64>;
