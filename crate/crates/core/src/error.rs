use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),

    #[error("color list has {colors} entries but matrix has {rows} rows")]
    ColorMismatch { colors: usize, rows: usize },

    #[error("duplicate color {0:?} in quadratic form")]
    DuplicateColor(String),

    #[error("matrix is singular")]
    Singular,

    #[error("size {size} exceeds the oracle bound {bound}")]
    BoundExceeded { size: usize, bound: usize },

    #[error("half-edge {0:?} is not attached to any vertex")]
    DanglingHalfEdge(String),

    #[error("half-edge {0:?} is used more than once")]
    HalfEdgeReused(String),

    #[error("half-edge {0:?} is not covered by any edge")]
    UnmatchedHalfEdge(String),

    #[error("edge references unknown half-edge {0:?}")]
    UnknownHalfEdge(String),

    #[error("vertex {index} has valency {valency}, expected 3")]
    BadValency { index: usize, valency: usize },

    #[error("edge joins half-edge {0:?} to itself")]
    SelfEdge(String),

    #[error("circle count must be non-negative, got {0}")]
    NegativeCircles(i64),

    #[error("color base name must be nonempty")]
    EmptyColor,

    #[error("diagram has {vertices} vertices, canonicalization budget is {budget}")]
    VertexBudget { vertices: usize, budget: usize },

    #[error("incomplete pairing assignment: {0}")]
    IncompleteAssignment(String),

    #[error("bad translation rule: {0}")]
    BadTranslation(String),

    #[error("exponential of a sum with a degree-0 term")]
    DegreeZeroExponent,

    #[error("exponential needs a truncation bound: {0}")]
    MissingTruncation(String),

    #[error("integrand is not a perturbed Gaussian: {0}")]
    NotGaussian(String),

    #[error("relation context mismatch: {0}")]
    RelationContext(String),

    #[error("span basis has {keys} keys, bound is {bound}")]
    BasisBound { keys: usize, bound: usize },

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
