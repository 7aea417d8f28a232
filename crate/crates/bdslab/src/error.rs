//! Error taxonomy shared by every module.
//!
//! The variants are coarse on purpose: callers (CLI, FFI) map them onto
//! process exit codes / C status codes, so each variant must correspond to a
//! distinct *kind* of failure rather than a distinct call site.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain (negative power,
    /// fraction above 1, zero rounds, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Inputs are individually in range but describe a degenerate situation
    /// with no meaningful answer (e.g. pricing a trade when nobody betrays).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The scenario violates the inequality chain `p <= tau*alpha < beta`
    /// that the trade analysis requires.
    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),

    /// A requested trade price lies outside the feasible interval.
    #[error("infeasible price: {0}")]
    InfeasiblePrice(String),

    /// The request is well-formed but too large to enumerate exactly
    /// (e.g. a betrayal game with more miners than the exhaustive solver
    /// supports).
    #[error("capacity exceeded: {0}")]
    Capacity(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
