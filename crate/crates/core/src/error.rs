use std::fmt;

/// Errors raised by the domain model and the document codec.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// The document does not match the schema. `path` points at the offending value.
    Decode {
        path: String,
        message: String,
    },
    /// Well-formed input that breaks a model invariant.
    Invalid {
        path: String,
        message: String,
    },
    UnknownEmployee(String),
    OutOfRange(String),
}

impl ModelError {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        ModelError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Decode { path, message } => write!(f, "decode error at {path}: {message}"),
            ModelError::Invalid { path, message } => write!(f, "invalid {path}: {message}"),
            ModelError::UnknownEmployee(id) => write!(f, "unknown employee id {id:?}"),
            ModelError::OutOfRange(what) => write!(f, "index out of range: {what}"),
        }
    }
}

impl std::error::Error for ModelError {}

/// Rejected solver or generator configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Anything a solver run can fail with.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    Config(ConfigError),
    Model(ModelError),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Config(e) => e.fmt(f),
            SolveError::Model(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for SolveError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SolveError::Config(e) => Some(e),
            SolveError::Model(e) => Some(e),
        }
    }
}

impl From<ConfigError> for SolveError {
    fn from(e: ConfigError) -> Self {
        SolveError::Config(e)
    }
}

impl From<ModelError> for SolveError {
    fn from(e: ModelError) -> Self {
        SolveError::Model(e)
    }
}
