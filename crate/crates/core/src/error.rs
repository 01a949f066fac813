use alloc::string::String;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("node {node} is not a valid {expected} node for a depth-{depth} tree")]
    InvalidNode {
        node: usize,
        depth: u32,
        expected: &'static str,
    },
    #[error("shape mismatch: expected {expected} features, got {actual}")]
    Shape { expected: usize, actual: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("extraction error: {0}")]
    Extraction(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("audit error: {0}")]
    Audit(String),
    #[error("enumeration cap exceeded: {0}")]
    EnumerationCap(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
