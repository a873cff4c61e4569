//! CLI error taxonomy mapped onto exit codes: 1 for usage problems,
//! 2 for numerical-control and I/O failures.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(tcsolve_core::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "error[E_USAGE]: {msg}"),
            CliError::Core(e) => write!(f, "error[{}]: {e}", e.code()),
            CliError::Io(e) => write!(f, "error[E_IO]: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) => {
                if e.is_numerical() {
                    2
                } else {
                    1
                }
            }
            CliError::Io(_) => 2,
        }
    }
}

impl From<tcsolve_core::Error> for CliError {
    fn from(e: tcsolve_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
