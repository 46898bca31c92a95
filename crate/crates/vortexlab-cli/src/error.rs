use std::fmt;

#[derive(Debug)]
pub enum CliError {
    ConfigInvalid(String),
    /// A study stage failed; `stage` names it.
    Numerical { stage: String, message: String },
    IncompleteRun(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid(_) | CliError::IncompleteRun(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }

    pub fn numerical(stage: impl Into<String>, message: impl fmt::Display) -> Self {
        CliError::Numerical {
            stage: stage.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::ConfigInvalid(m) => write!(f, "invalid config: {m}"),
            CliError::Numerical { stage, message } => write!(f, "stage `{stage}` failed: {message}"),
            CliError::IncompleteRun(m) => write!(f, "incomplete run: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Attaches a stage name to library errors.
pub trait Stage<T> {
    fn stage(self, name: &str) -> Result<T, CliError>;
}

impl<T, E: fmt::Display> Stage<T> for Result<T, E> {
    fn stage(self, name: &str) -> Result<T, CliError> {
        self.map_err(|e| CliError::numerical(name, e))
    }
}
