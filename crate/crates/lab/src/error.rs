use std::path::Path;

/// Failures surfaced by the harness, each with a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] qfeistel::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl LabError {
    /// 2 for configuration errors, 3 for capacity guards, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core(qfeistel::Error::Config(_)) => 2,
            LabError::Core(qfeistel::Error::Capacity(_)) => 3,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        LabError::Io { path: path.display().to_string(), source }
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> LabResult<T> {
    Err(LabError::Core(qfeistel::Error::Config(msg.into())))
}
