//! First-passage percolation on configuration models with infinite-variance
//! power-law degrees.
//!
//! The numeric parts are generic over a [`Real`] scalar (`f32` or `f64`);
//! matching and percolation probabilities are generic over any field, so the
//! exact equalities can be checked in rational arithmetic. Concrete aliases
//! for the common instantiations are exported below.

pub mod bp;
pub mod distributions;
pub mod error;
pub mod fpp;
pub mod graph;
pub mod harness;
pub mod layers;
pub mod numerics;
pub mod percolation;
pub mod rng;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub use distributions::{DegreeLaw, ExcessWeightLaw, SizeBiasedLaw, Verdict};
pub use fpp::{PathResult, WeightAssignment, WeightMode};
pub use graph::{HalfEdgeGraph, Matching};
pub use layers::{LayerPath, LayerSchedule};
pub use percolation::{PercolatedGraph, PercolationPolicy};

/// Comment line opening every CSV file written by the crate.
pub const CSV_VERSION: &str = "#fppcm-v1";

/// Exact probabilities for the enumeration oracles.
pub type Exact = num_rational::BigRational;

pub type DegreeLawF64 = DegreeLaw<f64>;
pub type ExcessLawF64 = ExcessWeightLaw<f64>;
pub type ExcessLawF32 = ExcessWeightLaw<f32>;
pub type SizeBiasedF64 = SizeBiasedLaw<f64>;
pub type WeightsF64 = WeightAssignment<f64>;
pub type WeightsF32 = WeightAssignment<f32>;
pub type PathF64 = PathResult<f64>;
pub type PolicyF64 = PercolationPolicy<f64>;
pub type ScheduleF64 = LayerSchedule<f64>;
pub type ScheduleF32 = LayerSchedule<f32>;
