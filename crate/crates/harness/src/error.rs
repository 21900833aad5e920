use std::path::PathBuf;

/// Errors from configuring, running or writing an experiment.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// The offending config key and why it was rejected.
    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("run failed: {0}")]
    Run(#[from] certgd::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl HarnessError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, HarnessError::Config { .. })
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
