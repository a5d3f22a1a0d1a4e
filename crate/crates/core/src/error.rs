use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid coefficient ring: {0}")]
    InvalidRing(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("exact kernel requested over a non-field truncation ring; only residue-field data is available")]
    ResidueFieldOnly,
    #[error("not a unit: {0}")]
    NotUnit(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("coefficient ring is not perfect; Frobenius cannot be inverted")]
    NotPerfect,
    #[error("degenerate pairing")]
    DegeneratePairing,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
