use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("compressibility factor Z = {z} is not positive at p = {p} Pa (eta = {eta})")]
    NonPositiveZ { eta: f64, p: f64, z: f64 },

    #[error("no subsonic pressure in [{lo}, {hi}] Pa reaches potential {target}")]
    NoBracket { target: f64, lo: f64, hi: f64 },

    #[error("edge {edge}: {source}")]
    OnEdge {
        edge: String,
        #[source]
        source: Box<Error>,
    },

    #[error("state leaves the subsonic domain at p = {p} Pa, q = {q}")]
    SubsonicViolation { p: f64, q: f64 },

    #[error("loads do not balance: sum = {0}")]
    Unbalanced(f64),

    #[error("node {0} has zero throughput but feeds downstream flow")]
    ZeroThroughput(String),

    #[error("compressor {edge} carries backflow q = {q}")]
    CompressorBackflow { edge: String, q: f64 },

    #[error("network has {0} independent cycles; at most one is supported")]
    MultipleCycles(usize),

    #[error("edge {0} is not on the cycle")]
    NotACycleEdge(String),

    #[error("edge {0} is a compressor and cannot be flipped")]
    CannotFlipCompressor(String),

    #[error("cut edge {0} is a compressor")]
    CutThroughCompressor(String),

    #[error("sequence does not sum to zero (sum = {0})")]
    NotZeroSum(f64),

    #[error("cut residual has no sign change on [{lo}, {hi}]: g(lo) = {g_lo} Pa, g(hi) = {g_hi} Pa")]
    SignConditionFailed { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("outer iteration did not converge after {iterations} steps (best residual {best_residual} Pa)")]
    NoConvergence { iterations: usize, best_residual: f64 },

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("unknown edge {0}")]
    UnknownEdge(String),

    #[error("network validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn on_edge(self, edge: &str) -> Self {
        match self {
            e @ Error::OnEdge { .. } => e,
            other => Error::OnEdge { edge: edge.to_string(), source: Box::new(other) },
        }
    }

    /// Innermost cause, looking through [`Error::OnEdge`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::OnEdge { source, .. } => source.root(),
            other => other,
        }
    }
}
