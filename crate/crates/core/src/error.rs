use thiserror::Error;

/// Errors raised by the analysis, rate and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point, interval or function lies outside the domain it is used on,
    /// or two objects live on different domains.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The hypothesis class does not support the requested operation.
    #[error("unsupported hypothesis class: {0}")]
    Unsupported(String),

    /// An enumeration would exceed its configured size limit.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A modelling assumption required by the requested quantity does not hold.
    #[error("assumption violated: {0}")]
    Assumption(String),

    /// An invariant that should hold by construction was found broken.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
