use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("could not parse configuration: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] igusa_core::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
