use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] isogap::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Assertion = 2,
    Numerical = 3,
    Config = 4,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Core(e) if e.is_numerical() => Exit::Numerical,
            _ => Exit::Config,
        }
    }
}
