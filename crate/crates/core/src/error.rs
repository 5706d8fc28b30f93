use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid weight literal `{0}`")]
    InvalidWeight(String),

    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("negative weight {0}")]
    NegativeWeight(f64),

    #[error("bipartition violation: edge {u}-{v} lies inside one side")]
    BipartitionViolation { u: usize, v: usize },

    #[error("graph is not bipartite")]
    NotBipartite,

    #[error("matrix is not PSD (eigenvalue {0})")]
    NotPsd(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("approximation not defined: {0}")]
    NotDefined(String),

    #[error("expander partition failed: {0}")]
    PartitionFailure(String),

    #[error("degree mismatch at vertex {0}")]
    DegreeMismatch(usize),

    #[error("not Eulerian at vertex {vertex}")]
    NotEulerian { vertex: usize },

    #[error("second singular value {sigma} exceeds 1 - 1/tau = {bound}")]
    SingularityTooClose { sigma: f64, bound: f64 },

    #[error("graph is not strongly connected")]
    NotStronglyConnected,

    #[error("stationary lower bound {s_lower} exceeds minimum stationary probability {pi_min}")]
    StationaryBound { s_lower: f64, pi_min: f64 },

    #[error("step {step} epsilon {eps} exceeds budget {budget}")]
    BudgetExceeded { step: usize, eps: f64, budget: f64 },

    #[error("matrix is not normal")]
    NotNormal,

    #[error("isolated vertex {0}")]
    IsolatedVertex(usize),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("verification failed after {attempts} attempts: epsilon {eps} > {target}")]
    VerificationFailed { attempts: usize, eps: f64, target: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
