use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate register id `{0}`")]
    DuplicateRegister(String),
    #[error("register `{0}` not found")]
    RegisterNotFound(String),
    #[error("invalid register `{id}`: {reason}")]
    InvalidRegister { id: String, reason: String },
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("operation on the zero ket")]
    ZeroKet,
    #[error("partition is not a cover of the layout: {0}")]
    BadPartition(String),
    #[error("family consistency failure: {0}")]
    FamilyConsistency(String),
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
