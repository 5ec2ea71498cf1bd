use thiserror::Error;

/// Failures that map to exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] sqkd_core::Error),
}

impl CliError {
    /// Prefixes the message with `what`, keeping the variant.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{what}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{what}: {m}")),
            CliError::Core(e) => CliError::Input(format!("{what}: {e}")),
        }
    }
}
