use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("invalid override: {0}")]
    Override(String),

    #[error("invalid scenario: {0}")]
    Invalid(String),

    #[error("invalid scenario: {0}")]
    Core(#[from] fcmp_core::Error),

    #[error("no preset or file named `{0}` (see `fcmp list-presets`)")]
    UnknownScenario(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serializing the report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
