use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("audit failed: {0}")]
    Audit(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Audit(_) => 3,
            CliError::Solver(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<qecnet_core::Error> for CliError {
    fn from(e: qecnet_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<qecnet_sim::SimError> for CliError {
    fn from(e: qecnet_sim::SimError) -> Self {
        match e {
            qecnet_sim::SimError::Model(m) => m.into(),
            other => CliError::Solver(other.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
