use thiserror::Error;

/// Errors shared across the expression engine, representation builders,
/// verification, and the intertwiner pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("syntax error at byte {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("bad exponent: {0}")]
    BadExponent(String),
    #[error("letter `{0}` is not bound in the representation")]
    UnboundLetter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bracket denominator vanishes at q = {0}")]
    DivergentBracket(num_complex::Complex64),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid q: {0}")]
    InvalidQ(String),
    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),
    #[error("operator is not odd: even-component max-abs {0:.3e}")]
    NotOdd(f64),
    #[error("operator is not self-adjoint: deviation max-abs {0:.3e}")]
    NotSelfAdjoint(f64),
    #[error("expression uses letters outside the allowed set: {0}")]
    LetterViolation(String),
    #[error("sector decomposition failed: off-sector residual {0:.3e}")]
    SectorDecompositionFailure(f64),
    #[error("no vacuum vector: annihilator null space is empty")]
    NoVacuum,
    #[error("representation is reducible: null space dimension {0} > 1")]
    ReducibleRepresentation(usize),
    #[error("constraint system is inconsistent: least-squares residual {0:.3e}")]
    InconsistentSystem(f64),
    #[error("matrix is not homogeneous under the declared grading: off-block max-abs {0:.3e}")]
    InhomogeneousMatrix(f64),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
