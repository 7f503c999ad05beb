use std::path::PathBuf;

use thiserror::Error;

/// A single failed config invariant, tagged with the dotted field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot serialize config: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("invalid config: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Which end of a wireless hop failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkDirection {
    Uplink,
    Downlink,
}

/// Errors raised by the channel, compute and game models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("user {0} has no channel assignment")]
    Unassigned(usize),
    #[error("{direction:?} link carries {bits} bits at zero rate")]
    InfeasibleLink { direction: LinkDirection, bits: f64 },
    #[error("invalid digital-twin estimate: discrepancy {discrepancy} must lie in [0, {rate})")]
    InvalidDtEstimate { rate: f64, discrepancy: f64 },
    #[error("λ = {lambda} > 0 with zero INC share")]
    StarvedShare { lambda: f64 },
    #[error("zero cost in performance-gain denominator")]
    ZeroCost,
    #[error("split refinement did not converge after {iterations} iterations (step norm {residual:.3e})")]
    SplitNonConvergence { iterations: usize, residual: f64 },
    #[error("brute-force enumeration supports at most {max} users, got {got}")]
    TooManyUsers { max: usize, got: usize },
    #[error("sequence length mismatch: {rewards} rewards vs {values} values")]
    LengthMismatch { rewards: usize, values: usize },
    #[error("{variant} has no {head} critic head")]
    MissingCriticHead {
        variant: &'static str,
        head: &'static str,
    },
    #[error("empty sample set")]
    EmptySamples,
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
}

/// Errors from the learning stack and the run harness.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("non-finite {what} during update {update}: {detail}")]
    NonFinite {
        what: &'static str,
        update: usize,
        detail: String,
    },
    #[error("trajectory buffer is incomplete: {0}")]
    IncompleteBuffer(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("reference run `{0}` not found")]
    MissingReference(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl RunError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.into(),
            source,
        }
    }
}
