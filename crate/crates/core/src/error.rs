use std::fmt;

use thiserror::Error;

/// A single problem found while validating an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub index: Option<usize>,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, index: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            index,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{}: {} at index {}", self.field, self.message, i),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance ({} violation(s)): {}", .0.len(), join(.0))]
    Invalid(Vec<Violation>),

    #[error("cannot merge columns of group {group}: costs differ within the group")]
    MergeRefused { group: usize },

    #[error("unbounded search domain: {0}")]
    UnboundedDomain(String),

    #[error("engine precondition failed: {0}")]
    Precondition(String),

    #[error("oracle contract violated: {0}")]
    ContractViolation(String),

    #[error("search volume {volume} exceeds the limit of {limit}")]
    VolumeLimit { volume: u128, limit: u128 },

    #[error("dynamic program exceeded {limit} states")]
    StateLimit { limit: usize },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
