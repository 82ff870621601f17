//! Query-adaptive keyframe selection.
//!
//! Frames are chosen from a bounded 1 FPS candidate pool by greedily
//! maximizing `alpha * R(S) + beta * C(S)`, where `R` sums per-frame query
//! relevance and `C` is a facility-location coverage term over semantic
//! similarities. A small text classifier can route each question to one of
//! four `(alpha, beta)` presets.
//!
//! The numeric modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the CLI uses.

pub mod binfmt;
pub mod cli;
pub mod compare;
pub mod embedding;
pub mod error;
pub mod io;
pub mod oracle;
pub mod pool;
pub mod preset;
pub mod router;
pub mod scalar;
pub mod selector;

pub use error::{Error, Result};
pub use pool::{build_pool, frame_index_of_second, CandidatePool, PoolManifest, Position, VideoMeta};
pub use preset::{make_preset, Preset, PresetName};
pub use scalar::Scalar;

pub type Matrix = embedding::Matrix<f64>;
pub type EmbeddingSet = embedding::EmbeddingSet<f64>;
pub type RelevanceScores = embedding::RelevanceScores<f64>;
pub type SimilarityMatrix = embedding::SimilarityMatrix<f64>;
pub type CoverageState = selector::CoverageState<f64>;
pub type Objective<'a> = selector::Objective<'a, f64>;
pub type SelectionResult = selector::SelectionResult<f64>;
pub type Instance = oracle::Instance<f64>;
