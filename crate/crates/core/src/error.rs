use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("vectors are linearly dependent")]
    LinearlyDependent,
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("cone is not pointed")]
    NotPointed,
    #[error("point is not a vertex of the polytope")]
    NotAVertex,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("linear program is {0}")]
    MalformedLp(&'static str),
    #[error("short vector search failed to descend (max |alpha| = {0})")]
    DescentFailure(String),
    #[error("cone apex lies on a rational facet hyperplane: {0}")]
    IrrationalityViolated(String),
    #[error("no generic substitution direction found after {0} attempts")]
    NoGenericDirection(usize),
    #[error("substitution direction is orthogonal to a denominator generator")]
    NonGenericDirection,
    #[error("substitution produced a non-integral total {0}")]
    NonIntegralCount(String),
    #[error("bounding box holds {0} points, above the brute-force limit")]
    BoxTooLarge(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("malformed generating function at line {line}: {msg}")]
    GenFunParse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
