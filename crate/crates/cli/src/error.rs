use uavplan_core::Error as CoreError;

/// Failure of a command, carrying the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Unreadable or invalid input. Exit 2.
    Input(String),
    /// A solver failed on valid input. Exit 3.
    Solver(String),
    /// The request has no feasible answer. Exit 4.
    Infeasible(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Infeasible(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Solver(m) | CliError::Infeasible(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e.root() {
            CoreError::InvalidParameter { .. } | CoreError::UnknownEnvironment(_) => CliError::Input(msg),
            CoreError::NoSolution { .. } => CliError::Infeasible(msg),
            _ => CliError::Solver(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
