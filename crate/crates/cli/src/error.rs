use thiserror::Error;

/// Failures mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::CheckFailed(_) => 1,
            Self::Config(_) => 2,
            Self::Numerical(_) | Self::Io(_) => 3,
        }
    }
}

impl From<qprobe_core::Error> for CliError {
    fn from(e: qprobe_core::Error) -> Self {
        use qprobe_core::Error as E;
        match e {
            E::SizeGuard { .. } | E::InvalidParameter(_) | E::InvalidSpin(_) | E::InvalidGrid(_) => {
                Self::Config(e.to_string())
            }
            E::Io(io) => Self::Io(io),
            other => Self::Numerical(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Numerical(format!("serialization: {e}"))
    }
}
