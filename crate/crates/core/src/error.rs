use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("NaN encountered in {0}")]
    NaN(&'static str),
    #[error("malformed set: {0}")]
    MalformedSet(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("domain must be bounded: {0}")]
    UnboundedDomain(String),
    #[error("expected value is set-valued ({0} components)")]
    SetValuedMode(usize),
    #[error("possibility function is multimodal")]
    Multimodal,
    #[error("loss is unbounded below on the domain")]
    UnboundedLoss,
    #[error("unnormalised posterior vanishes everywhere (prior-data conflict)")]
    DegeneratePosterior,
    #[error("degenerate information: {0}")]
    DegenerateInformation(String),
    #[error("not log-concave: {0}")]
    NotLogConcave(String),
    #[error("combinatorial budget exceeded: {0} tuples")]
    BudgetExceeded(u128),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("not a maximum: {0}")]
    NotAMaximum(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
