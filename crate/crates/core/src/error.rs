use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular transform (|det| = {det:e})")]
    SingularTransform { det: f64 },

    #[error("coefficient undefined for basis ({k}, {l}): vanishing denominator")]
    CoefficientUndefined { k: usize, l: usize },

    #[error("no selectable basis function")]
    NoSelectableBasis,

    #[error("reconstruction area holds no samples")]
    EmptyArea,

    #[error("mesh holds no samples")]
    EmptyMesh,

    #[error("method {0} cannot reconstruct from a mesh")]
    MeshUnsupported(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
