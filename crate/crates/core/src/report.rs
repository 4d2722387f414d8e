//! Pass/fail reports shared by the checkers.

use serde::Serialize;

use crate::lincomb::Vector;

/// A basis word on which an identity fails, with the nonzero residual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub arity: usize,
    pub word: Vec<usize>,
    pub residual: Vector,
}

/// Outcome of checking an identity for every arity up to `max_arity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub max_arity: usize,
    pub first_failure: Option<Failure>,
}

impl CheckReport {
    pub fn pass(max_arity: usize) -> Self {
        Self { max_arity, first_failure: None }
    }

    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }

    pub fn failing_arity(&self) -> Option<usize> {
        self.first_failure.as_ref().map(|f| f.arity)
    }
}

/// Serializable status word used by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}
