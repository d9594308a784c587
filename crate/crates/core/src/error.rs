use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unmatched edge {polygon}.{edge}")]
    UnmatchedEdge { polygon: i64, edge: usize },
    #[error("edge {polygon}.{edge} glued more than once")]
    DuplicateEdge { polygon: i64, edge: usize },
    #[error("edge vector mismatch between {a} and {b}: residual {residual:e}")]
    EdgeMismatch { a: String, b: String, residual: f64 },
    #[error("invalid polygon {id}: {reason}")]
    InvalidPolygon { id: i64, reason: String },
    #[error("unknown polygon id {0}")]
    UnknownPolygon(i64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point is not on the surface: {0}")]
    PointNotOnSurface(String),
    #[error("surface has no cone points")]
    NoConePoints,
    #[error("search exceeded cutoff {cutoff}")]
    CutoffExceeded { cutoff: f64 },
    #[error("work budget of {budget} exhausted")]
    BudgetExhausted { budget: usize },
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("invalid slit: {0}")]
    InvalidSlit(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),
}

pub type Result<T> = std::result::Result<T, FlatError>;
