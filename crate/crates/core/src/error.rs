use thiserror::Error;

use crate::sexp::Pos;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

/// Failures of the signature reader and validator.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("{pos}: duplicate sort `{name}`")]
    DuplicateSort { name: String, pos: Pos },
    #[error("{pos}: duplicate operation `{name}`")]
    DuplicateOp { name: String, pos: Pos },
    #[error("{pos}: undeclared sort `{name}`")]
    UndeclaredSort { name: String, pos: Pos },
}

/// Failures of the typing judgments.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("ill-typed {subject} by rule {rule}: {reason}")]
    IllTyped {
        rule: &'static str,
        subject: String,
        reason: String,
    },
    #[error("type mismatch: `{left}` versus `{right}`")]
    Mismatch { left: String, right: String },
}

impl TypeError {
    pub(crate) fn ill_typed(
        rule: &'static str,
        subject: impl std::fmt::Display,
        reason: impl Into<String>,
    ) -> TypeError {
        TypeError::IllTyped {
            rule,
            subject: subject.to_string(),
            reason: reason.into(),
        }
    }
}

/// Errors raised by the normalizers.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum NormError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("rewrite fuel exhausted after {0} steps")]
    FuelExhausted(u64),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
