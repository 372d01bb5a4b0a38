use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Bloch vector of norm {0}")]
    InvalidBlochVector(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("not an effect: {0}")]
    InvalidEffect(String),

    #[error("measurement is incomplete: max deviation from identity {0:e}")]
    Incomplete(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("projector is not rank one: {0}")]
    NotRankOne(String),

    #[error("decomposition infeasible: {0}")]
    DecompositionInfeasible(String),

    #[error("malformed protocol: {0}")]
    MalformedProtocol(String),

    #[error("basis is not an orthonormal product basis in block form: {0}")]
    NotBlockForm(String),

    #[error("effect is not a product: {0}")]
    NonProduct(String),
}

pub type Result<T> = std::result::Result<T, Error>;
