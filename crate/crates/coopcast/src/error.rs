use thiserror::Error;

/// Failures surfaced by the command line, each with a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse {what}: {msg}")]
    Parse { what: String, msg: String },
    #[error("invalid input: {0}")]
    Invariant(coopcast_core::Error),
    #[error("infeasible configuration: {0}")]
    Infeasible(String),
    #[error("audit failed: {0}")]
    Audit(String),
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
            CliError::Usage(_) => 64,
            CliError::Parse { .. } | CliError::Io { .. } => 2,
            CliError::Invariant(_) | CliError::Audit(_) => 3,
            CliError::Infeasible(_) => 65,
        }
    }

    pub(crate) fn parse(what: impl Into<String>, msg: impl ToString) -> Self {
        CliError::Parse {
            what: what.into(),
            msg: msg.to_string(),
        }
    }
}

impl From<coopcast_core::Error> for CliError {
    /// Errors from a computation on already validated inputs mean the
    /// request cannot be served, everything else is bad data.
    fn from(e: coopcast_core::Error) -> Self {
        use coopcast_core::Error as E;
        match e {
            E::NotDegraded(_) | E::Cardinality(_) | E::MemoryCap { .. } | E::InvalidConfig(_) | E::TooLarge(_) => {
                CliError::Infeasible(e.to_string())
            }
            other => CliError::Invariant(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
