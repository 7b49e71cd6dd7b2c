//! Structured failures. Every error that reaches `main` carries the module
//! and operation it came from so it can be printed as a JSON object.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub module: &'static str,
    pub operation: &'static str,
    pub kind: String,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{}: {}", self.module, self.operation, self.message)
    }
}

impl std::error::Error for Failure {}

impl Failure {
    pub fn new(module: &'static str, operation: &'static str, kind: &str, message: impl Into<String>) -> Self {
        Failure {
            module,
            operation,
            kind: kind.to_string(),
            message: message.into(),
        }
    }
}

/// Tags a library result with the operation that produced it.
pub trait At<T> {
    fn at(self, module: &'static str, operation: &'static str) -> anyhow::Result<T>;
}

impl<T> At<T> for rotset_core::Result<T> {
    fn at(self, module: &'static str, operation: &'static str) -> anyhow::Result<T> {
        self.map_err(|e| Failure::new(module, operation, e.kind(), e.to_string()).into())
    }
}

impl<T> At<T> for std::io::Result<T> {
    fn at(self, module: &'static str, operation: &'static str) -> anyhow::Result<T> {
        self.map_err(|e| Failure::new(module, operation, "Io", e.to_string()).into())
    }
}

impl<T> At<T> for serde_json::Result<T> {
    fn at(self, module: &'static str, operation: &'static str) -> anyhow::Result<T> {
        self.map_err(|e| Failure::new(module, operation, "Parse", e.to_string()).into())
    }
}

/// Converts any error into the printable form; errors without a tag are
/// attributed to the CLI itself.
pub fn describe(err: &anyhow::Error) -> Failure {
    match err.downcast_ref::<Failure>() {
        Some(f) => f.clone(),
        None => Failure::new("cli", "dispatch", "Internal", format!("{err:#}")),
    }
}
