//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    // corpus
    #[error("missing truth file for document '{0}'")]
    MissingTruth(String),
    #[error("missing text file for document '{0}'")]
    MissingText(String),
    #[error("unparsable truth JSON in {path}: {reason}")]
    BadTruthFile { path: PathBuf, reason: String },
    #[error("document '{id}': author count {authors} is invalid (must be >= 1)")]
    InvalidAuthorCount { id: String, authors: i64 },
    #[error("{path}: line {line}: {reason}")]
    BadJsonlLine {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("duplicate document id '{0}'")]
    DuplicateDocId(String),
    #[error("document '{0}' has empty text but carries a label")]
    EmptyLabeledText(String),
    #[error("document id must be nonempty")]
    EmptyDocId,
    #[error("split ratios {0:?} do not sum to 1")]
    BadSplitRatios([f64; 3]),
    #[error("stratified split requires labeled documents; '{0}' has no label")]
    UnlabeledInStratifiedSplit(String),

    // textprep
    #[error("missing resource file {0}")]
    MissingResource(PathBuf),
    #[error("bad resource file {path}: {reason}")]
    BadResource { path: PathBuf, reason: String },

    // features
    #[error("cannot fit TF-IDF on an empty document collection")]
    EmptyFitCorpus,
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    // augment
    #[error("balancing requires exactly two label classes, found {0}")]
    NotTwoClasses(usize),
    #[error("minority class has {minority} samples; k_neighbors={k} requires more")]
    MinorityTooSmall { minority: usize, k: usize },
    #[error("no minority document has at least 2 characters to swap")]
    MinorityTooShort,

    // classifiers
    #[error("{model}: training requires both classes, got a single class")]
    SingleClassTraining { model: &'static str },
    #[error("{model}: rows ({rows}) and labels ({labels}) are misaligned")]
    LabelMismatch {
        model: &'static str,
        rows: usize,
        labels: usize,
    },
    #[error("invalid hyperparameter for {model}: {reason}")]
    BadHyperparameter { model: &'static str, reason: String },

    // optim
    #[error("invalid bounds: {0}")]
    BadBounds(String),
    #[error("swarm size must be >= 2, got {0}")]
    BadSwarmSize(usize),
    #[error("objective is not finite at the starting point")]
    NonFiniteStart,

    // fusion
    #[error("score file {path}: {reason}")]
    BadScoreFile { path: PathBuf, reason: String },
    #[error("score columns share no document ids")]
    EmptyScoreJoin,
    #[error("weight vector is all zeros")]
    AllZeroWeights,
    #[error("weight arity {weights} does not match model count {models}")]
    WeightArityMismatch { weights: usize, models: usize },
    #[error("validation set is empty")]
    EmptyValidationSet,

    // eval
    #[error("predictions ({predictions}) and labels ({labels}) are misaligned")]
    EvalMismatch { predictions: usize, labels: usize },
    #[error("cannot evaluate against an Unknown label (document index {0})")]
    UnknownLabelInEval(usize),
    #[error("nothing to evaluate")]
    EmptyEvaluation,

    #[error("model file {path}: {reason}")]
    BadModelFile { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
