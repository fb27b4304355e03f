use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const DEGENERATE_DATA: i32 = 4;
    pub const INSUFFICIENT_RANGE: i32 = 5;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}: no data rows", path.display())]
    EmptyDataset { path: PathBuf },

    #[error("{}: all points are identical", path.display())]
    IdenticalPoints { path: PathBuf },

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("K range: {0}")]
    KRange(String),

    #[error(transparent)]
    Core(#[from] vtsfd_core::Error),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use vtsfd_core::Error as Core;
        match self {
            HarnessError::Io { .. } => exit::IO,
            HarnessError::Parse { .. } | HarnessError::Manifest(_) | HarnessError::Config(_) => exit::PARSE,
            HarnessError::EmptyDataset { .. } | HarnessError::IdenticalPoints { .. } => exit::DEGENERATE_DATA,
            HarnessError::KRange(_) => exit::INSUFFICIENT_RANGE,
            HarnessError::Core(e) => match e {
                Core::InvalidArgument(_) => exit::PARSE,
                Core::DegenerateData(_) | Core::EmptyCluster { .. } | Core::DegenerateCentroids { .. } => {
                    exit::DEGENERATE_DATA
                }
                Core::InsufficientRange(_) => exit::INSUFFICIENT_RANGE,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
