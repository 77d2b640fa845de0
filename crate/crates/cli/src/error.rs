//! Exit-code mapping.

use std::fmt;
use std::io;

use qutrit_qrg::Error;

pub const EXIT_FAILURE: u8 = 1;
/// Malformed tensor JSON or config TOML.
pub const EXIT_MALFORMED: u8 = 2;
pub const EXIT_ZERO_TENSOR: u8 = 3;
/// Singular block, vanishing X_ren or a truncated flow.
pub const EXIT_SINGULAR: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(EXIT_FAILURE, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Json(_) | Error::WrongLength(_) | Error::NonFinite { .. } => EXIT_MALFORMED,
            Error::ZeroTensor => EXIT_ZERO_TENSOR,
            Error::SingularBlock { .. }
            | Error::VanishingXren(_)
            | Error::NoRealRoot { .. }
            | Error::TruncatedFlow { .. } => EXIT_SINGULAR,
            _ => EXIT_FAILURE,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::new(EXIT_FAILURE, e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new(EXIT_FAILURE, format!("serializing output: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
