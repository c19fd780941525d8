use std::path::PathBuf;

use liquid_influence::io::DocumentError;
use liquid_influence::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{0}: no such file or bundled graph")]
    UnknownGraph(String),
    #[error("{context}{error}")]
    Document { context: String, error: DocumentError },
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn document(context: impl Into<String>, error: DocumentError) -> Self {
        CliError::Document { context: context.into(), error }
    }

    /// Machine-readable code printed next to the message.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Read { .. } => "io-error",
            CliError::UnknownGraph(_) => "unknown-graph",
            CliError::Document { error, .. } => error.code(),
            CliError::Core(e) => e.code(),
            CliError::Usage(_) => "usage",
        }
    }

    /// 3 for the resource guards, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        let core = match self {
            CliError::Core(e) => Some(e),
            CliError::Document { error: DocumentError::Validation(e), .. } => Some(e),
            _ => None,
        };
        match core {
            Some(CoreError::TooLarge { .. } | CoreError::NoConvergence { .. }) => 3,
            _ => 1,
        }
    }

    /// Extra advice printed after the message.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Core(CoreError::TooLarge { .. }) => {
                Some("exact enumeration is limited; estimate the value with `sample` instead")
            }
            CliError::Core(CoreError::NoConvergence { .. }) => {
                Some("raise --max-iters, loosen --tolerance, or rely on the analytic column")
            }
            _ => None,
        }
    }
}
