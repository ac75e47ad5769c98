//! Episodic SDR sequence classification.
//!
//! Symbol sequences are cut into sliding windows, each window is encoded as a
//! sparse distributed representation (one disjoint bit band per position),
//! and an online prototype tree absorbs the encoded windows: similar inputs
//! merge into existing leaves, related ones branch as siblings, unrelated
//! ones open new roots. Interior nodes compose their children by bitwise OR
//! and carry summed label histograms.
//!
//! Classification runs one identification per window and harmonizes the
//! per-window labels by frequency into a class distribution; the positive
//! class frequency is the score fed to tie-aware ROC AUC. Alongside the
//! classifier live the benchmark pieces: dataset loading and validation,
//! synthetic planted-motif fixtures, comparative analytics (win rates,
//! average ranks, per-model summaries) and the bundled reference tables they
//! run against.

pub mod baselines;
pub mod datasets;
pub mod encoder;
pub mod episodic;
pub mod error;
pub mod fixtures;
pub mod metrics;
pub mod tree;

pub use encoder::{Codebook, Sdr, WindowConfig};
pub use error::{Error, Result};
pub use tree::{CoreConfig, Model, ModelConfig};
