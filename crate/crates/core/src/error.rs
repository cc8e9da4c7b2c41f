use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph not connected")]
    Disconnected,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge id `{0}`")]
    UnknownEdge(String),
    #[error("graph too large: {what} count {count} exceeds {max}")]
    TooLarge {
        what: &'static str,
        count: usize,
        max: usize,
    },

    #[error("subcurve must be nonempty")]
    EmptySubcurve,
    #[error("subcurve refers to vertex index {0} outside the graph")]
    SubcurveOutOfRange(usize),
    #[error("operation requires a proper subcurve")]
    NotProper,
    #[error("subcurve is not connected")]
    SubcurveNotConnected,

    #[error("chain length for edge `{0}` must be at least 1")]
    NonPositiveLength(String),
    #[error("curve is not semistable")]
    NotSemistable,
    #[error("curve is not quasistable")]
    NotQuasistable,
    #[error("curve is not stable")]
    NotStable,
    #[error("genus {0} is below 2")]
    GenusTooSmall(i64),
    #[error("every vertex is exceptional and they form a single cycle")]
    ExceptionalCycle,

    #[error("multidegree has {found} entries, graph has {expected} vertices")]
    GraphMismatch { expected: usize, found: usize },
    #[error("multidegree is missing vertex `{0}`")]
    MissingVertex(String),
    #[error("degree sequence is empty")]
    EmptySequence,
    #[error("line bundle is not admissible on the chain over edge `{0}`")]
    NotAdmissible(String),
    #[error("polarization is incompatible with degree {degree}: rank*(d + 1 - g) + deg(e) = {defect}")]
    IncompatiblePolarization { degree: i64, defect: i64 },
    #[error("polarization rank must be positive, got {0}")]
    NonPositiveRank(i64),
    #[error("quasistability base vertex must not lie on a contracted chain")]
    BaseOnChain,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("pushforwards of twist-equivalent bundles differ: {0}")]
    CompadmViolation(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json(err.to_string())
    }
}
