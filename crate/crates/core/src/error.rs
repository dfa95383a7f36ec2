use thiserror::Error;

use crate::problems::ProblemError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed decimal {0:?}")]
    Parse(String),

    #[error("invalid precision: {0}")]
    Precision(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate pair: both evaluations sit at alpha = {0}")]
    DegeneratePair(String),

    #[error("degenerate secant: g({gamma}) equals g({alpha})")]
    DegenerateSecant { gamma: String, alpha: String },

    #[error("invalid start: g({alpha}) = {g} is negative")]
    InvalidStart { alpha: String, g: String },

    #[error("invalid bracket [{gamma}, {alpha}]: need g(gamma) <= 0 <= g(alpha) and gamma <= alpha (g(gamma) = {g_gamma}, g(alpha) = {g_alpha})")]
    InvalidBracket {
        gamma: String,
        alpha: String,
        g_gamma: String,
        g_alpha: String,
    },

    #[error("numeric breakdown in accelerated step: denominator {denominator} <= 0 for the pair alpha_prev = {prev_alpha}, alpha_cur = {cur_alpha}")]
    NumericBreakdown {
        denominator: String,
        prev_alpha: String,
        cur_alpha: String,
    },

    #[error("non-finite value produced at alpha = {0}")]
    NonFinite(String),

    #[error("not enough data: {0}")]
    NotEnoughData(String),

    #[error("unsupported problem: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Problem(#[from] ProblemError),
}
