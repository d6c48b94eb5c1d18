use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("slope a = {0} must satisfy 0 < a < 1")]
    InvalidSlope(f64),
    #[error("offset b = {0} must satisfy 0 <= b < 1")]
    InvalidOffset(f64),
    #[error("{name} = {value} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("branch script exhausted at step {step}")]
    BranchScriptExhausted { step: usize },
    #[error("tie script exhausted at seat {seat}")]
    TieScriptExhausted { seat: usize },
    #[error("scripted tie choice {choice} is not among the tied parties at seat {seat}")]
    TieScriptInvalid { seat: usize, choice: usize },
    #[error("invalid fraction {p}/{q}")]
    InvalidFraction { p: i64, q: i64 },
    #[error("inverse is only defined when a + b > 1")]
    InverseDomain,
    #[error("expected an irrational-regime rotation number, got {p}/{q}")]
    RationalRotation { p: u64, q: u64 },
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("state outside K: V_{party} = {value}")]
    StateOutsideK { party: usize, value: f64 },
    #[error("indeterminate: {0}")]
    Indeterminate(&'static str),
    #[error("no stationary point found on any face")]
    NoStationaryPoint,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
