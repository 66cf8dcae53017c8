use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("weight ({0}, {1}) is outside the level-{2} alcove")]
    OutsideAlcove(i64, i64, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("negative entry in recursion at {0}: graph and level do not match")]
    NegativeEntry(String),
    #[error("size mismatch: graph has {vertices} vertices but the invariant has {exponents} exponents")]
    SizeMismatch { vertices: usize, exponents: usize },
    #[error("graph is not strongly connected")]
    NotConnected,
    #[error("adjacency matrix is not normal")]
    NonNormalAdjacency,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("no convergence after {restarts} restarts (best residual {best:.3e})")]
    NoConvergence { best: f64, restarts: usize },
    #[error("inconsistent Hilbert series at degree {degree}: {detail}")]
    InconsistentSeries { degree: usize, detail: String },
    #[error("no order-3 automorphism of {0} gives a terminating series")]
    MissingRotation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("integer overflow in {0}")]
    Overflow(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
