//! Robust two-view model estimation: MAGSAC++ scoring with σ-consensus++
//! polishing, Progressive NAPSAC sampling, baseline scorers and samplers,
//! minimal solvers and ground-truth metrics.
//!
//! The crate is `no_std` and only needs `alloc`. Float math goes through
//! `num_traits::Float`; when std is linked its inherent methods take over,
//! hence the `allow(unused_imports)` on those imports.
#![no_std]
// `!(x > 0.0)` is the NaN-rejecting form used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod engine;
pub mod geometry;
pub mod metrics;
pub mod sampling;
pub mod scoring;

pub use engine::{run_estimation, EngineConfig, EngineError, EstimationReport, Scorer};
pub use geometry::{Correspondence, GeometryError, ImageSizes, Model, ModelKind};
pub use metrics::GroundTruth;
pub use sampling::SamplerKind;
pub use scoring::{NoiseConfig, ScoreProfile};
