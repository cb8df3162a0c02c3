use thiserror::Error;

/// Failures of a CLI invocation, one variant per exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("computation error: {0}")]
    Compute(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Compute(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    /// Errors raised while turning a config into a packet and grid. Bad
    /// parameters are the user's to fix; a grid over the node cap is not.
    pub fn from_setup(context: &str, e: toa_core::Error) -> Self {
        match e {
            toa_core::Error::GridCapExceeded { .. } => CliError::Compute(format!("{context}: {e}")),
            _ => CliError::Config(format!("{context}: {e}")),
        }
    }

    pub fn compute(e: toa_core::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}
