use thiserror::Error;

/// Failure of a CLI command, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or input files; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The computation itself failed; exit code 1.
    #[error(transparent)]
    Compute(#[from] pointscatter_core::Error),
    /// Output could not be written; exit code 1.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Compute(_) => "computation",
            CliError::Io(_) => "io",
        }
    }

    /// One-line JSON for stderr: `{"error":"usage","message":"..."}`.
    pub fn json_line(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
