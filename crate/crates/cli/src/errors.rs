//! Error-to-exit-code mapping: 0 ok, 2 config, 3 parse, 4 cap, 5 numerical.

use kdsp_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Parse(String),
    Cap(String),
    Numerical(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Parse(_) => "parse",
            CliError::Cap(_) => "cap",
            CliError::Numerical(_) => "numerical",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Parse(m) | CliError::Cap(m) | CliError::Numerical(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Cap(_) => 4,
            CliError::Numerical(_) => 5,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Parse(_) | CoreError::NotABasis(_) => CliError::Parse(msg),
            CoreError::EnumerationCap { .. } | CoreError::QubitCap { .. } => CliError::Cap(msg),
            CoreError::GapSearchFailed(_)
            | CoreError::NoNontrivialSubLattice
            | CoreError::EmptyTargetSet
            | CoreError::NotReduced => CliError::Numerical(msg),
            CoreError::InvalidParameter(_)
            | CoreError::DimensionMismatch(_)
            | CoreError::SymbolicKTooLarge(_) => CliError::Config(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Parse(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(format!("json: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
