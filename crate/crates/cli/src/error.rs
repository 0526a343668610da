use std::path::PathBuf;

use thiserror::Error;

use bnls_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("problem spec violates the hypotheses: {}", .0.join("; "))]
    Spec(Vec<String>),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("output directory {0} already exists")]
    OutputExists(PathBuf),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
    #[error("every sweep point failed")]
    SweepFailed { code: i32 },
}

impl CliError {
    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Self {
        let context = context.into();
        move |source| Self::Io { context, source }
    }

    /// Process exit status. Sweep drivers classify runs by this alone.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Spec(_) => 3,
            Self::Core(e) => match e {
                CoreError::InvalidGrid(_)
                | CoreError::GridTooSmall { .. }
                | CoreError::InvalidRunConfig(_)
                | CoreError::RangeError { .. } => 2,
                CoreError::InvalidSpec(_) | CoreError::DimensionTooSmall { .. } | CoreError::SpecMismatch(_) => 3,
                CoreError::NoConvergence { .. } | CoreError::StagnationDetected { .. } => 4,
                CoreError::CertificationFailure(_) => 5,
                CoreError::NonFinite(_) => 6,
                _ => 1,
            },
            Self::OutputExists(_) => 7,
            Self::Io { .. } | Self::Snapshot(_) => 1,
            Self::SweepFailed { code } => *code,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taxonomy() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Spec(vec![]).exit_code(), 3);
        assert_eq!(CliError::from(CoreError::DimensionTooSmall { dim: 4 }).exit_code(), 3);
        assert_eq!(CliError::from(CoreError::NoConvergence { iterations: 1, residual: 1.0 }).exit_code(), 4);
        assert_eq!(CliError::from(CoreError::CertificationFailure(vec![])).exit_code(), 5);
        assert_eq!(CliError::from(CoreError::NonFinite("u".into())).exit_code(), 6);
        assert_eq!(CliError::OutputExists("o".into()).exit_code(), 7);
    }
}
