//! Classification of single- vs multi-authored documents.
//!
//! The pipeline: load a labeled corpus ([`corpus`]), optionally clean the
//! text ([`textprep`]), vectorize with TF-IDF ([`features`]), balance the
//! training split ([`augment`]), train classical classifiers
//! ([`classifiers`]), then combine per-model probability scores through
//! weighted late fusion ([`fusion`]) whose weights are selected on a
//! validation set by derivative-free optimization ([`optim`]). Quality is
//! summarized by [`eval`].

pub mod augment;
pub mod classifiers;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod fusion;
pub mod optim;
pub mod textprep;

pub use corpus::{Corpus, Document, Label, SplitSpec};
pub use error::{Error, Result};
pub use eval::{ConfusionMatrix, MetricsReport};
pub use features::{FeatureMatrix, TfIdfConfig, TfIdfModel};
pub use fusion::{FusionMethod, FusionOutcome, ScoreColumn, ScoreMatrix, WeightVector};
pub use optim::OptimResult;
