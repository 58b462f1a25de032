use thiserror::Error;

/// Errors produced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("numerical failure in {stage}: {detail}")]
    Numerical { stage: &'static str, detail: String },

    #[error("optimizer did not reach tolerance (best value {best}, gradient norm {grad_norm:e})")]
    NonConvergence { best: f64, grad_norm: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numerical(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Numerical { stage, detail: detail.into() }
    }

    pub(crate) fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format { what, detail: detail.into() }
    }
}
