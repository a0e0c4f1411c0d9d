use nuosc::OscError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error: {0}")]
    Numerical(#[from] OscError),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// 1 for anything the user can fix in the config, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 1,
            CliError::Numerical(_) | CliError::Validation(_) => 2,
        }
    }
}
