use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad user-facing configuration: window size, attribute index, CLI value.
    #[error("configuration error: {0}")]
    Config(String),

    /// A precondition of an operation was violated by its input.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input exceeds the exhaustive-search or DP budget of an oracle.
    #[error("capacity exceeded: {what} has size {size}, budget is {budget}")]
    Capacity {
        what: &'static str,
        size: usize,
        budget: usize,
    },

    /// A scoring heuristic was evaluated on a record paired with itself.
    #[error("scoring heuristic is undefined on identical records (id {0})")]
    UndefinedEvaluation(u64),

    #[error("metric is undefined: {0}")]
    UndefinedMetric(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for capacity errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
