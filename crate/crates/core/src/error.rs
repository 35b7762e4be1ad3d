use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("schema error: missing required column '{0}'")]
    MissingColumn(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("duplicate observation key {0}")]
    DuplicateKey(String),

    #[error("unknown variable '{0}'")]
    UnknownVariable(String),

    #[error("invalid observation key: {0}")]
    InvalidKey(String),

    #[error("codebook error: {0}")]
    Codebook(String),

    #[error("design matrix is rank deficient; collinear columns: {0:?}")]
    Collinear(Vec<String>),

    #[error("underidentified model: {n_instruments} instruments for {n_endogenous} endogenous regressors")]
    Underidentified {
        n_instruments: usize,
        n_endogenous: usize,
    },

    #[error("insufficient time depth: {0}")]
    InsufficientTimeDepth(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wrap an i/o error with the offending path.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the underlying cause is a missing file, used by the CLI to
    /// pick exit code 2.
    pub fn is_not_found(&self) -> bool {
        match self {
            Error::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            Error::Csv { source, .. } => matches!(
                source.kind(),
                csv::ErrorKind::Io(e) if e.kind() == std::io::ErrorKind::NotFound
            ),
            _ => false,
        }
    }
}
