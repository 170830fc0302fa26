use std::path::Path;

/// Failures surfaced by the command line, mapped onto exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, configuration or input files. Exit code 2.
    #[error("{0}")]
    Usage(String),
    /// A checked property did not hold. Exit code 1.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }

    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Usage(format!("{}: {e}", path.display()))
    }
}

impl From<mfplan_core::Error> for CliError {
    fn from(e: mfplan_core::Error) -> Self {
        match e {
            mfplan_core::Error::Internal(_) => CliError::Failed(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
