//! Crate-wide error type.
//!
//! Every fallible operation in the library returns [`Error`]; the CLI maps
//! variants onto process exit codes, so the classification here (data vs
//! capacity vs internal) is part of the contract.

use std::path::PathBuf;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown symbol '{symbol}' at position {position}")]
    UnknownSymbol { symbol: char, position: usize },

    #[error("SDR width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("model has no trained representations")]
    UntrainedModel,

    #[error("representation capacity exceeded: limit {limit}, would need {needed} more node(s)")]
    CapacityExceeded { limit: usize, needed: usize },

    #[error("model/config mismatch: {0}")]
    ConfigMismatch(String),

    #[error("malformed model file{}: {msg}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    MalformedModel { msg: String, line: Option<usize> },

    #[error("dataset {path}: {msg} (line {line})")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("dataset {path}: unknown symbol '{symbol}' (line {line}, column {column})")]
    UnknownDatasetSymbol {
        path: PathBuf,
        line: usize,
        column: usize,
        symbol: char,
    },

    #[error("dataset {0}: no records after header")]
    EmptyDataset(PathBuf),

    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    #[error("invalid synthetic spec: {0}")]
    InvalidSyntheticSpec(String),

    #[error("AUC undefined: {0}")]
    UndefinedAuc(String),

    #[error("score matrix incomplete: task '{task}', model '{model}'")]
    IncompleteMatrix { task: String, model: String },

    #[error("task group '{group}' incomplete: missing '{missing}'")]
    IncompleteGroup { group: String, missing: String },

    #[error("empty score matrix")]
    EmptyMatrix,

    #[error("cannot harmonize an empty vote list")]
    EmptyVotes,

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Wrap with a human-readable context prefix (record index, file name, ...).
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, unwrapping context layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}
