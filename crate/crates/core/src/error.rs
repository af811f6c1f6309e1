use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{0}` has no target vertex")]
    MissingEndpoint(String),
    #[error("edge `{edge}` has invalid length {length}")]
    InvalidLength { edge: String, length: f64 },
    #[error("edge `{0}` is a half-line but the graph is periodic")]
    HalflineInPeriodic(String),
    #[error("edge `{edge}` has a shift with {got} components, expected {dim}")]
    ShiftDimension { edge: String, got: usize, dim: usize },
    #[error("dimension {0} is not supported")]
    UnsupportedDimension(usize),
    #[error("spec has no vertices")]
    EmptySpec,
    #[error("the generated graph is disconnected")]
    Disconnected,
    #[error("spec `{0}` is not canonical; rebase it first")]
    NotCanonical(String),
    #[error("rebase factor must be at least 1")]
    InvalidRebaseFactor,
    #[error("offset {offset} lies outside edge of length {length}")]
    OffsetOutOfRange { offset: f64, length: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("malformed function file: {0}")]
    Format(String),
    #[error("unknown spec `{0}`")]
    UnknownSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
