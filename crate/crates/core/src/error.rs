use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("normalization error: signal column `{column}` has zero variance")]
    Normalization { column: String },

    #[error("join error: no unemployment rate for countries {}", .countries.join(", "))]
    Join { countries: Vec<String> },

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("evaluation error in fold {fold}: {source}")]
    Evaluation {
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn fit(msg: impl Into<String>) -> Self {
        Error::Fit(msg.into())
    }

    pub fn integrity(msg: impl Into<String>) -> Self {
        Error::Integrity(msg.into())
    }

    pub fn parse(line: u64, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Tags the error with the pipeline stage it escaped from.
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Process exit status used by the command-line front end.
    ///
    /// 2 = parse/configuration/input, 3 = data integrity, 4 = model fit,
    /// 5 = evaluation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Config(_) | Error::Io { .. } | Error::Json(_) => 2,
            Error::Integrity(_) | Error::Join { .. } | Error::Normalization { .. } => 3,
            Error::Fit(_) | Error::Shape { .. } => 4,
            Error::Domain(_) | Error::UndefinedCorrelation(_) | Error::Evaluation { .. } => 5,
            Error::Stage { source, .. } => source.exit_code(),
        }
    }
}
