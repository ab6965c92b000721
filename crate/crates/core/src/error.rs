use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed edge-list input. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("size cap exceeded: {what} needs {needed} > cap {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no matching has uncovered set as given: inconsistent at vertex {vertex} ({reason})")]
    Reconstruction { vertex: usize, reason: String },

    #[error("kernel dimension {spectral} from eigenvalue threshold disagrees with exact nullity {exact}")]
    KernelRankMismatch { spectral: usize, exact: usize },

    #[error("rank deficient basis: {0}")]
    RankDeficient(String),

    #[error("matrix is not an orthogonal projection: {0}")]
    NotProjection(String),

    #[error("negative probability {value} for subset {subset:?}")]
    NegativeProbability { value: f64, subset: Vec<usize> },

    #[error("ground set mismatch: {0}")]
    GroundMismatch(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
