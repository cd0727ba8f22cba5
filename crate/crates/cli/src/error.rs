use std::fmt;

use randers_lie::{ErrorClass, GeometryError};
use thiserror::Error;

/// One problem found while reading a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<Issue>),

    #[error("{0}")]
    Engine(#[from] GeometryError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError::Validation(vec![Issue {
            line: None,
            message: message.into(),
        }])
    }

    /// 2 parse, 3 validation, 4 math domain, 5 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Engine(e) => match e.class() {
                ErrorClass::Validation => 3,
                ErrorClass::MathDomain => 4,
                ErrorClass::Numerical => 5,
            },
        }
    }
}
