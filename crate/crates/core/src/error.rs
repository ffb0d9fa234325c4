use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: `{key}` {reason}")]
    InvalidConfig { key: &'static str, reason: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("numerical fault: {0}")]
    Numerical(String),

    /// Every AP already controls `L_p` UEs.
    #[error("capacity exhausted: {0}")]
    Capacity(String),

    #[error("{algorithm} exceeded its iteration bound of {limit}: {trace}")]
    IterationLimit {
        algorithm: &'static str,
        limit: usize,
        trace: String,
    },

    #[error("{0}")]
    Precondition(String),

    #[error("instance seed {seed:#018x}: {source}")]
    Instance {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn in_instance(self, seed: u64) -> Error {
        match self {
            e @ Error::Instance { .. } => e,
            e => Error::Instance {
                seed,
                source: Box::new(e),
            },
        }
    }
}
