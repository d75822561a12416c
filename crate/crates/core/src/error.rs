use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("twist matrices differ")]
    TwistMismatch,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid twist matrix: {0}")]
    InvalidTwist(String),
    #[error("generator u{0} is outside the domain of this map")]
    OutsideDomain(usize),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("invalid derivation: {0}")]
    InvalidDerivation(String),
    #[error("element is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("element escapes the fixed-point algebra: {0}")]
    EscapesFixedPoint(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
