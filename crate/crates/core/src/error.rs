use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("extension degree {0} is outside 1..=128")]
    UnsupportedDegree(u32),
    #[error("tower exponent {0} is outside 1..=32")]
    TowerExponent(u32),
    #[error("level {level} of the GF(2^{m}) tower exceeds 128 bits")]
    LevelTooLarge { m: u32, level: u32 },
    #[error("GF(2^{from}) is not a subfield of GF(2^{to})")]
    NotASubfield { from: u32, to: u32 },
    #[error("value {value:#x} does not fit in GF(2^{bits})")]
    OutOfRange { bits: u32, value: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("polynomials live over different fields or variable sets")]
    Incompatible,
    #[error("scheme is not zero-dimensional")]
    NotZeroDimensional,
    #[error("degree bound {0} too small to certify the Hilbert polynomial")]
    DegreeTooSmall(usize),
    #[error("generator does not vanish at the origin")]
    NotAtOrigin,
    #[error("Gaussian defect is infinite in every trial: intersection is not isolated")]
    InfiniteDefect,
    #[error("point is not singular on the surface")]
    NotSingular,
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
