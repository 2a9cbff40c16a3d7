use regulus::EngineError;
use thiserror::Error;

/// Errors surfaced to the command line. Syntax errors carry the byte offset
/// into the offending line; everything else is a message.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CliError {
    #[error("syntax error at offset {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unbound name {0:?}")]
    Unbound(String),
    #[error("no algebra loaded; run `load-algebra FILE` first")]
    NoAlgebra,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Bad(String),
}

impl CliError {
    pub fn syntax(offset: usize, msg: impl Into<String>) -> Self {
        CliError::Syntax {
            offset,
            msg: msg.into(),
        }
    }

    pub fn bad(msg: impl Into<String>) -> Self {
        CliError::Bad(msg.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
