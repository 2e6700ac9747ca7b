use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Runtime {
        stage: &'static str,
        #[source]
        source: lfp_core::Error,
    },

    #[error("writing {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    /// 1 for usage and configuration problems, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Runtime { source, .. } => match source {
                lfp_core::Error::Config(_) | lfp_core::Error::UnsupportedSchedule(_) => 1,
                _ => 2,
            },
            Self::Io { .. } => 2,
        }
    }
}

/// Attach the name of the failing stage to a library error.
pub(crate) trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError>;
}

impl<T> Stage<T> for lfp_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Runtime { stage, source })
    }
}
