use std::path::PathBuf;

use thiserror::Error;

use crate::ring::Level;

#[derive(Debug, Error)]
pub enum Error {
    #[error("level mismatch: {left} vs {right} (lift explicitly)")]
    LevelMismatch { left: Level, right: Level },

    #[error("level {0} is not supported (maximum {max})", max = crate::ring::MAX_LEVEL)]
    LevelTooHigh(u32),

    #[error("{op} is undefined at level 0")]
    LevelZero { op: &'static str },

    #[error("cannot lift from {from} down to {to}")]
    BadLift { from: Level, to: Level },

    #[error("element does not lie in the subfield at {0}")]
    NotInSubfield(Level),

    #[error("division by zero")]
    DivisionByZero,

    #[error("index {index} out of range (must be < {bound})")]
    OutOfRange { index: u64, bound: u64 },

    #[error("{what} would visit {size} exponent vectors, limit {limit}")]
    TooLarge { what: &'static str, size: u64, limit: u64 },

    #[error("element is not integral")]
    NotIntegral,

    #[error("element is zero")]
    ZeroElement,

    #[error("parse error at `{token}`: {message}")]
    Parse { token: String, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported PCF shape: preperiod {preperiod}, period {period}")]
    UnsupportedShape { preperiod: usize, period: usize },

    #[error("continued fraction does not converge: {0}")]
    Divergent(String),

    #[error("comparison undecided at {precision} bits")]
    Undecided { precision: u32 },

    #[error("closest lattice vector undecided at {precision} bits ({candidates} tied candidates)")]
    UndecidedTie { precision: u32, candidates: usize },

    #[error("bound violated by unit with exponents {exponents:?} (torsion {torsion})")]
    BoundViolation { exponents: Vec<i64>, torsion: i8 },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(token: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { token: token.into(), message: message.into() }
    }

    /// True for failures caused by running out of numeric precision rather
    /// than by a mathematical check.
    pub fn is_undecided(&self) -> bool {
        matches!(self, Error::Undecided { .. } | Error::UndecidedTie { .. })
    }
}
