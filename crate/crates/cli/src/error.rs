use thiserror::Error;

/// Failures that end a command, each mapped to a process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("uncertified result: {0}")]
    Uncertified(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// Library errors raised while building inputs are configuration errors.
    pub fn from_config(e: jacobi_spectral::Error) -> Self {
        CliError::Config(e.to_string())
    }

    /// Library errors raised during a computation.
    pub fn from_run(e: jacobi_spectral::Error) -> Self {
        use jacobi_spectral::Error as E;
        match e {
            E::Uncertified { .. } | E::NonConvergence { .. } => CliError::Uncertified(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Uncertified(_) => exit::UNCERTIFIED,
            CliError::Io(_) | CliError::Output(_) => exit::CONFIG,
        }
    }
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const FAILED: i32 = 3;
    pub const UNCERTIFIED: i32 = 4;
}
