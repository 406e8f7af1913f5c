use thiserror::Error;

/// Errors raised by the pointwise numerics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point outside the domain of an evaluator (for example `z <= 0`).
    #[error("domain error: {0}")]
    Domain(&'static str),
    /// A parameter violated its admissible range.
    #[error("parameter error: {name} = {value} ({constraint})")]
    Parameter {
        /// Parameter name.
        name: &'static str,
        /// Offending value.
        value: f64,
        /// Human readable constraint that failed.
        constraint: &'static str,
    },
    /// An exponent pair violated the wave-admissibility relation.
    #[error("inadmissible pair (p, q) = ({p}, {q}): {reason}")]
    Inadmissible {
        /// Time exponent.
        p: f64,
        /// Space exponent.
        q: f64,
        /// Which constraint failed.
        reason: &'static str,
    },
    /// Not enough data for a regression.
    #[error("need at least {needed} points for a fit, got {got}")]
    TooFewPoints {
        /// Minimum required.
        needed: usize,
        /// Points supplied.
        got: usize,
    },
}
