use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("field length {got} does not match mesh with {expected} interior nodes")]
    FieldLength { expected: usize, got: usize },

    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },

    #[error("fields live on different meshes")]
    MeshMismatch,

    #[error("singular operator: {0}")]
    Singular(String),

    #[error("operator is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("conjugate gradients stopped after {iterations} iterations with relative residual {residual:e}")]
    CgNoConvergence { iterations: usize, residual: f64 },

    #[error("outside B*: 2v0*+K = {value} <= K/2 = {bound} at node {node}")]
    OutsideBStar { node: usize, value: f64, bound: f64 },

    #[error("outside A*: -2v0*+K = {value} <= K/2 = {bound} at node {node}; K > {needed_k} is required")]
    OutsideAStar {
        node: usize,
        value: f64,
        bound: f64,
        needed_k: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} did not converge: {detail}")]
    NoConvergence { what: &'static str, detail: String },

    #[error("box minimizer lies on the boundary at {point:?}; enlarge the box")]
    MinimizerOnBoundary { point: Vec<f64> },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {msg}")]
    Csv {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("unknown suite `{0}` (expected thm1, thm2, thm3-penalty, toland, exact-dual, biconj or all)")]
    UnknownSuite(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
