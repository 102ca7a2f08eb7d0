use thiserror::Error;

/// Errors raised by the symbolic engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid deformation parameter q = {0}: q must differ from 0, 1 and -1")]
    InvalidQ(String),

    #[error("`{0}` is not an exact rational; write it as p/r (for example 3/2)")]
    DecimalInput(String),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("composition weight mismatch: {left} vs {right}")]
    KappaMismatch { left: String, right: String },

    #[error("deformation parameter mismatch: {left} vs {right}")]
    QMismatch { left: String, right: String },

    #[error("power {power} lies outside the stored window [{lo}, {top}]")]
    OutsideWindow { power: i64, lo: i64, top: i64 },

    #[error("x^-1 has no q-antiderivative among Laurent monomials")]
    NonIntegrable,

    #[error("invalid binomial arguments: k = {k} exceeds n = {n}")]
    BinomialRange { n: i64, k: i64 },

    #[error("generator u{0} is not covered by the flow table; deepen the Lax window")]
    MissingGenerator(u32),

    #[error("dressing step {step} is not solvable: constant term {constant} in (tau - 1) w = r")]
    Unsolvable { step: usize, constant: String },

    #[error("q = {0} is not the square of a rational; the Weyl product needs q^(1/2)")]
    NotPerfectSquare(String),

    #[error("x-exponents must be non-negative for a terminating product (found x^{0})")]
    NonPolynomialX(i64),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
