use std::path::PathBuf;

/// Failures that map to dedicated exit codes.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("missing artifacts: {}", .0.display())]
    MissingArtifacts(PathBuf),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::MissingArtifacts(_) => 3,
        }
    }
}
