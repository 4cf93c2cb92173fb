use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, SteinerError>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SteinerError {
    #[error("syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("terminals {0} and {1} are not connected")]
    DisconnectedTerminals(NodeId, NodeId),
    #[error("input graph is disconnected")]
    Disconnected,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("degenerate query: {0}")]
    Degenerate(String),
    #[error("k must be at least 2 (got {0})")]
    InvalidK(usize),
    #[error("{what} limit exceeded: {actual} > {limit}")]
    LimitExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("component {0} has no basic component")]
    NoBasicComponent(String),
    #[error("bound domain error: {0}")]
    Domain(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl SteinerError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            SteinerError::Internal(_) => 3,
            SteinerError::Domain(_) | SteinerError::InvalidK(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for SteinerError {
    fn from(e: std::io::Error) -> Self {
        SteinerError::Io(e.to_string())
    }
}
