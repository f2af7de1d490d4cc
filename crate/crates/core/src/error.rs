use thiserror::Error;

/// Errors produced by the trustnet core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid trust level: {0}")]
    InvalidTrustLevel(String),
    #[error("malformed frontier: {0}")]
    MalformedFrontier(String),
    #[error("observed strategy {0} is not on the frontier")]
    ObservedOffFrontier(usize),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("edge list parse error at line {line}: {msg}")]
    EdgeListParse { line: usize, msg: String },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("missing config key: {0}")]
    MissingConfigKey(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
