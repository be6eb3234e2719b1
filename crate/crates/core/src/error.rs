use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Pfaffian undefined for odd m (m = {0})")]
    OddDimension(usize),

    #[error("zero input: {0}")]
    ZeroInput(String),

    #[error("wrong shape: {0}")]
    WrongShape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid structure constants: {0}")]
    InvalidAlgebra(String),

    #[error("basis is not nice")]
    NoNiceBasis,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown name `{0}`")]
    Unknown(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
