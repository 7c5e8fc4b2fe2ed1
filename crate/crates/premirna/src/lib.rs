//! Pre-miRNA hairpin classification at desk scale.
//!
//! Two pipelines over the same data model:
//!
//! * a raw-sequence pipeline: FASTA → one-hot `4×160` matrices → a small 1D
//!   convolutional network trained by manual backpropagation, and
//! * a feature pipeline: FASTA → secondary-structure prediction → a catalogue
//!   of sequence/structure/thermodynamic features → a deep belief network
//!   (stacked RBMs pretrained with CD-1, fine-tuned with softmax
//!   cross-entropy).
//!
//! Supporting machinery covers k-means under-sampling of the majority class,
//! stratified k-fold cross-validation, confusion-matrix metrics, a synthetic
//! hairpin dataset generator, and model serialization. Every random choice
//! flows from an explicit seed so runs are exactly repeatable.
//!
//! Start with the runnable programs under `examples/`: each one exercises a
//! single capability end to end (`fold_sequence`, `extract_features`,
//! `train_cnn`, `train_dbn`, `cross_validate`, ...).

pub mod balance;
pub mod cli;
pub mod dbn;
pub mod encode;
pub mod error;
pub mod eval;
pub mod features;
pub mod fold;
pub mod model_io;
pub mod nn;
pub mod sequence;
pub mod shuffle;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Fixed input width of the one-hot encoder and hard cap on sequence length.
pub const MAX_SEQ_LEN: usize = 160;
