use std::fmt;

use thiserror::Error;

/// A single admissibility failure found while scanning a prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub index: usize,
    pub rule: ViolationRule,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationRule {
    /// `b_n < 1`.
    NonPositiveQuotient,
    /// `b_n + a_{n+1} < 1`.
    PairSumBelowOne,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            ViolationRule::NonPositiveQuotient => write!(f, "b_{} < 1", self.index),
            ViolationRule::PairSumBelowOne => {
                write!(f, "b_{} + a_{} < 1", self.index, self.index + 1)
            }
        }
    }
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CfError {
    #[error("malformed spec: {}", join(.violations))]
    MalformedSpec { violations: Vec<Violation> },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("invariant breach at n = {index}: {detail}")]
    InvariantBreach { index: usize, detail: String },
    #[error("index {index} out of range (available terms: {available})")]
    IndexOutOfRange { index: usize, available: usize },
    #[error("no sign-definite enclosure found from depth {depth} after {attempts} attempts")]
    EnclosureFailed { depth: usize, attempts: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not a negative continued fraction at n = {0}")]
    NotNcf(usize),
    #[error("no partial quotient >= 3 in the inspected prefix")]
    NoLargeTerm,
    #[error("not a regular continued fraction at n = {0}")]
    NotRcf(usize),
    #[error("not a Lehner continued fraction at n = {0}")]
    NotLcf(usize),
    #[error("prefix of {0} terms closes no complete (l, m) block")]
    IncompleteBlock(usize),
    #[error("depth {0} is too small to emit any stable regular term")]
    TruncationEmpty(usize),
    #[error("q_n < 2 for every n <= {0}; logarithms degenerate")]
    DegenerateQ(usize),
    #[error("condition not verified: {0}")]
    ConditionNotVerified(String),
    #[error("bad target exponent: {0}")]
    BadTarget(String),
    #[error("divisibility breach at n = {0}")]
    DivisibilityBreach(usize),
    #[error("bad period: {0}")]
    BadPeriod(String),
}

pub type Result<T> = std::result::Result<T, CfError>;
