use thiserror::Error;

/// Errors raised by the clustering, index and selection routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A cluster lost all of its membership mass during a centroid update.
    #[error("cluster {cluster} has zero membership mass")]
    EmptyCluster { cluster: usize },

    #[error("centroids {first} and {second} coincide (squared distance {sq_distance:e})")]
    DegenerateCentroids {
        first: usize,
        second: usize,
        sq_distance: f64,
    },

    #[error("insufficient range: {0}")]
    InsufficientRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
