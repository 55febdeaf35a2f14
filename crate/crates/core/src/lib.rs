//! Nonparametric estimation of the density of a random time `T` from
//! observations of a process stopped at `T`.
//!
//! Two estimators are provided. The Mellin route ([`sse`]) recovers `p_T`
//! from `|W_T|` through the factorization of Mellin transforms under
//! independent products. The Lévy route ([`gsse`]) recovers `p_T` from
//! `L_T` for a Lévy process with known characteristic exponent. Both are
//! generic over the floating-point type; the `*64` aliases below fix it to
//! `f64`.

pub mod error;
pub mod estimate;
pub mod fixtures;
pub mod gsse;
pub mod harness;
pub mod mellin;
pub mod quad;
pub mod sample;
pub mod scalar;
pub mod simulate;
pub mod special;
pub mod sse;

pub use error::{Error, Result};
pub use estimate::{DensityEstimate, EstimatorConfig};
pub use mellin::{MellinFunction, SmoothnessMode};
pub use sample::SampleSet;
pub use scalar::{Cx, Scalar};

pub type Complex64 = Cx<f64>;
pub type Complex32 = Cx<f32>;
pub type MellinFunction64 = MellinFunction<f64>;
pub type SampleSet64 = SampleSet<f64>;
pub type DensityEstimate64 = DensityEstimate<f64>;
pub type SampleSet32 = SampleSet<f32>;
pub type DensityEstimate32 = DensityEstimate<f32>;
