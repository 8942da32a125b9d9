//! Beat-map generation engine for the VR rhythm game Ragnarock.
//!
//! The crate turns a raw song into a playable level package in three stages:
//! beat placement from a predominant-local-pulse analysis of the audio,
//! rune-pattern selection from a character-level GRU trained on community
//! maps, and serialization into the game's level-folder format.

pub mod audio;
pub mod calibration;
pub mod codec;
pub mod corpus;
pub mod decode;
pub mod model;
pub mod persist;
pub mod pipeline;
pub mod spline;
pub mod train;

pub use audio::{AnalysisConfig, BeatPeaks, OnsetEnvelope, PlpCurve};
pub use calibration::{DensityProfile, Difficulty};
pub use codec::{DifficultyMap, GridSymbol, InfoDocument, Note};
pub use decode::AudioBuffer;
pub use model::{GruModel, Vocabulary};
pub use pipeline::{GenerationRequest, LevelPackage};
pub use train::TrainConfig;
