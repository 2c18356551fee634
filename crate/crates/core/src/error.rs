use thiserror::Error;

use crate::chain::OptionKind;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a mathematical precondition (non-positive price,
    /// fee factor outside (0, 1], anchor outside the strike grid, ...).
    #[error("domain: {0}")]
    Domain(String),

    /// Well-formed input that fails a data-level invariant (duplicate
    /// quotes, crossed bid/ask, inconsistent chain metadata, ...).
    #[error("data: {0}")]
    Data(String),

    /// Malformed input stream.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A required option quote is absent from the chain.
    #[error("no {kind} quote at strike {strike}")]
    MissingQuote { kind: OptionKind, strike: f64 },

    /// Every admissible strike pair violates the premium budget; carries
    /// the smallest violation seen so callers can report how far off the
    /// cheapest candidate was.
    #[error("no strike pair fits the budget; smallest violation {min_violation}")]
    Infeasible { min_violation: f64 },

    /// The chain has no put/call strikes inside the admissible bands.
    #[error("no admissible strike pair in the coverage interval")]
    NoAdmissiblePair,

    /// A payoff evaluator returned NaN or infinity during a grid sweep.
    #[error("evaluator produced a non-finite value at price {price}")]
    Evaluation { price: f64 },
}
