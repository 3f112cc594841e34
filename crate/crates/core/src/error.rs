use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate vector has length {got}, expected intrinsic dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies outside the domain")]
    OutsideDomain,

    #[error("point is too close to the boundary (distance {distance:.3e})")]
    TooCloseToBoundary { distance: f64 },

    #[error("invalid domain descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incompatible map types: {0}")]
    TypeMismatch(String),

    #[error("matrix coordinates are not defined for {0} domains")]
    NoMatrixForm(&'static str),

    #[error("ill-conditioned computation: {0}")]
    Conditioning(String),
}

pub type Result<T> = std::result::Result<T, Error>;
