use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("instance has no arms")]
    EmptyInstance,

    #[error("arm {index}: parameter {value} is outside [0, 1]")]
    ParameterOutOfRange { index: usize, value: f64 },

    #[error("invalid horizon: T={horizon}, K={arms} (need 1 <= K < T)")]
    InvalidHorizon { horizon: u64, arms: usize },

    #[error("confidence index requires at least one pull")]
    NonPositivePulls,

    #[error("all {0} pulls of the horizon have been made")]
    HorizonExhausted(u64),

    #[error("reward {0} is outside [0, 1]")]
    RewardOutOfRange(f64),

    #[error("arm index {index} out of range for K={arms}")]
    ArmOutOfRange { index: usize, arms: usize },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("the optimal arm is not unique")]
    NonUniqueOptimum,

    #[error("arm {0} is not Bernoulli")]
    NotBernoulli(usize),

    #[error("hard-pair gap {0} is not below 1/4")]
    DeltaTooLarge(f64),

    #[error("alpha {0} must lie in [0, 0.5)")]
    InvalidAlpha(f64),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("invalid policy `{0}`")]
    InvalidPolicy(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cell {cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// True for errors caused by bad input rather than a failure while running.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Cell { source, .. } => source.is_validation(),
            Error::Io { .. } | Error::HorizonExhausted(_) => false,
            _ => true,
        }
    }
}
