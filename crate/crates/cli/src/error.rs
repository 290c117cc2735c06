use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invariant failed: {0}")]
    Invariant(String),
    #[error("numerical tolerance not met: {0}")]
    Tolerance(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Tolerance(_) => 3,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<zeeman_core::Error> for CliError {
    fn from(e: zeeman_core::Error) -> Self {
        use zeeman_core::Error as E;
        match e {
            E::ToleranceNotMet { .. } | E::NonConvergence { .. } | E::DomainTooSmall { .. } | E::NonDifferentiable { .. } => {
                CliError::Tolerance(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
