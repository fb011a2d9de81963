use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A triple with some but not all fields empty after normalization.
    #[error("malformed triple at index {index}: ({subject:?}, {relation:?}, {object:?}) has empty fields")]
    MalformedTriple {
        index: usize,
        subject: String,
        relation: String,
        object: String,
    },

    /// Exhaustive edit-distance search refused: graph exceeds the size cap.
    #[error("graph with {nodes} nodes exceeds the exhaustive-search cap of {cap}")]
    GraphTooLarge { nodes: usize, cap: usize },

    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),

    #[error("threshold {0} is outside the open interval (0, 1)")]
    InvalidThreshold(f64),

    /// An aggregate was requested over zero items.
    #[error("{0} requires at least one item")]
    EmptyInput(&'static str),

    #[error("invalid perturbation plan: {0}")]
    InvalidPlan(String),

    /// Dataset line failed schema validation.
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("duplicate id {id:?} on line {line} (first seen on line {first_line})")]
    DuplicateId {
        id: String,
        first_line: usize,
        line: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// The scoring backend could not be reached or failed outright.
    #[error("scoring backend failure: {0}")]
    ScoringBackend(String),

    /// The scoring backend replied with something other than the wire contract.
    #[error("scoring backend protocol violation: {0}")]
    Protocol(String),

    /// A per-example failure, tagged with the record id it came from.
    #[error("example {id:?}: {source}")]
    Example {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown value {value:?} (expected one of: {expected})")]
    UnknownOption {
        value: String,
        expected: &'static str,
    },
}

impl Error {
    pub fn for_example(self, id: &str) -> Error {
        Error::Example {
            id: id.to_string(),
            source: Box::new(self),
        }
    }
}
