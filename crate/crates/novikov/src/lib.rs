//! Numerical laboratory for the optimal constants in exponential-martingale
//! integrability criteria for local martingales with jumps bounded below.
//!
//! The crate evaluates the constant functions `alpha` and `beta` together
//! with their helper functions, simulates compensated Poisson first-passage
//! constructions exactly, constructs verified parameter certificates for the
//! counterexamples showing the constants cannot be lowered, and estimates the
//! relevant expectations by reproducible parallel Monte Carlo.

pub mod certificate;
pub mod exponential;
pub mod monte_carlo;
pub mod poisson;
pub mod report;
pub mod special;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no finite quadratic-variation constant exists at jump floor -1")]
    NoBetaAtMinusOne,
    #[error("censored stopping record: barrier not reached within {max_jumps} jumps")]
    Censored { max_jumps: u64 },
    #[error("exponent margin {margin} is not positive; refusing heavy-tail mean estimate")]
    HeavyTail { margin: f64 },
    #[error("estimate untrusted: {n_censored} of {n_paths} paths censored")]
    Untrusted { n_censored: u64, n_paths: u64 },
    #[error("parameter search failed: {0}")]
    SearchFailed(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
