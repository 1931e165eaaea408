use std::path::PathBuf;

/// Errors raised anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate element {element}: measure {measure:e}")]
    DegenerateElement { element: usize, measure: f64 },
    #[error("non-conforming mesh: face {nodes:?} shared by {count} elements")]
    NonConforming { nodes: Vec<usize>, count: usize },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("mesh has no elements")]
    EmptyMesh,
    #[error("mesh generation failed: {0}")]
    Generation(String),
    #[error("unsupported MSH version {0} (only 2.2 ASCII is read)")]
    UnsupportedMshVersion(String),
    #[error("MSH parse error at line {line}: {msg}")]
    MshParse { line: usize, msg: String },
    #[error("MSH file mixes 2D and 3D volume elements")]
    MixedDimension,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Serialize { path: PathBuf, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("partitioning failed: {0}")]
    Partition(String),
    #[error("agglomeration on level {level} leaves {count} element(s) unassigned")]
    Unassigned { level: usize, count: usize },
    #[error("agglomerate {agglomerate} on level {level} has no coarse nodes")]
    NoCoarseNodes { level: usize, agglomerate: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero diagonal entry in row {0}")]
    ZeroDiagonal(usize),
    #[error("singular matrix: zero pivot in column {0}")]
    Singular(usize),
    #[error("iteration diverged: {0}")]
    Divergence(String),
    #[error("material error: {0}")]
    Material(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
