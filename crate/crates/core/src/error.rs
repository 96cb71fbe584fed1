//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation
    /// (negative time or frequency, Ohmicity exponent out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is unusable (zero resolution, empty grid, ...).
    #[error("config error: {0}")]
    Config(String),

    /// Malformed input data (too few trajectory samples, non-normalized
    /// amplitudes, trajectory not spanning the requested interval, ...).
    #[error("input error: {0}")]
    Input(String),

    /// The decay rate never changes sign, so no pulse instant exists.
    #[error("decay rate has no zero crossing for s = {s} (requires s > 2)")]
    NoCrossing { s: f64 },

    /// The first sign change of the decay rate falls at or beyond the horizon.
    #[error("first rate zero crossing t~ = {t_tilde} does not fit inside horizon T = {horizon}")]
    HorizonTooShort { t_tilde: f64, horizon: f64 },

    /// A requested control protocol cannot be realized.
    #[error("infeasible protocol: {0}")]
    Infeasible(String),

    /// The protocol shape is outside what a propagation mode supports.
    #[error("unsupported protocol: {0}")]
    UnsupportedProtocol(String),

    /// A Bloch vector is too close to the origin for field reconstruction.
    #[error("singular state at t = {t}: |r| below threshold")]
    SingularState { t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
