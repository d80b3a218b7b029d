//! CLI errors and the exit-code contract: 0 success, 1 I/O, 2 configuration,
//! 3 numerical failure.

use specrel_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{stage}: {message}")]
    Io { stage: &'static str, message: String },
    #[error("{stage}: {message}")]
    Config { stage: &'static str, message: String },
    #[error("{stage}: {message}")]
    Numerical { stage: &'static str, message: String },
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn io(stage: &'static str, message: impl Into<String>) -> Self {
        CliError::Io { stage, message: message.into() }
    }

    pub fn config(stage: &'static str, message: impl Into<String>) -> Self {
        CliError::Config { stage, message: message.into() }
    }

    pub fn numerical(stage: &'static str, message: impl Into<String>) -> Self {
        CliError::Numerical { stage, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config { .. } => 2,
            CliError::Numerical { .. } => 3,
        }
    }

    /// Classifies a library error raised during `stage`.
    pub fn from_core(stage: &'static str, e: CoreError) -> Self {
        let message = e.to_string();
        match e {
            CoreError::DependenceViolation { .. } => CliError::Config {
                stage,
                message: format!("{message}; jointly observed samples must satisfy the rate-ratio assumption"),
            },
            CoreError::Bandwidth(_)
            | CoreError::InvalidBand { .. }
            | CoreError::Pivot(_)
            | CoreError::Scenario(_)
            | CoreError::ComponentOutOfRange { .. }
            | CoreError::GridMismatch(_)
            | CoreError::WindowTooShort { .. } => CliError::Config { stage, message },
            _ => CliError::Numerical { stage, message },
        }
    }

    /// Like [`CliError::from_core`], but input-shape errors count as I/O.
    pub fn from_core_input(stage: &'static str, e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(_) | CoreError::DimensionMismatch { .. } | CoreError::BasisNotIdentifiable => {
                CliError::Io { stage, message: e.to_string() }
            }
            other => Self::from_core(stage, other),
        }
    }
}

/// `.map_err` helper for library calls.
pub trait Stage<T> {
    fn stage(self, stage: &'static str) -> CliResult<T>;
}

impl<T> Stage<T> for specrel_core::Result<T> {
    fn stage(self, stage: &'static str) -> CliResult<T> {
        self.map_err(|e| CliError::from_core(stage, e))
    }
}

impl<T> Stage<T> for std::io::Result<T> {
    fn stage(self, stage: &'static str) -> CliResult<T> {
        self.map_err(|e| CliError::io(stage, e.to_string()))
    }
}
