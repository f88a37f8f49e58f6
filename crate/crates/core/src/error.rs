use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("precision lost: {0}")]
    Precision(String),

    #[error("irregular singularity at {point}: coefficient of theta^{index} has a pole of order {order}")]
    Irregular { point: String, index: usize, order: i64 },

    #[error("exponents at {point} are not rational; numeric approximations {approx:?}")]
    IrrationalExponents { point: String, approx: Vec<(f64, f64)> },

    #[error("singular point at an irrational location: root of {factor}")]
    IrrationalSingularity { factor: String },

    #[error("point {0} is not a point of maximal unipotent monodromy")]
    NotMum(String),

    #[error("identity check failed: {0}")]
    Mismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numeric evaluation: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
