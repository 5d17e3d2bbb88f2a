//! Desk-scale numerical laboratory for bilinear ergodic averages sampled
//! along `(⌊√n⌋, n)`.
//!
//! The crate computes the averaging operators `A_N`, `Ã_N` and their dual
//! functions, r-variation and jump-counting norms over lacunary scale sets,
//! Gowers uniformity norms, Littlewood–Paley band projections, the discrete
//! and continuous exponential-sum symbols with a principal-arc witness scan,
//! a model paraproduct, and shifted square functions. The [`lab`] module
//! drives seeded experiments that measure the scaling behaviour of these
//! objects on small instances and fit the observed exponents.
//!
//! Everything operates on finitely supported functions on the integers
//! ([`gridfn::GridFunction`]); all operations are pure and safe to call from
//! concurrent workers.

pub mod averages;
pub mod gowers;
pub mod gridfn;
pub mod lab;
pub mod spectral;
pub mod variation;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A numeric argument was outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A frequency grid was too small for the function it must represent.
    #[error("grid of size {got} is undersized: need at least {need}")]
    UndersizedGrid { need: usize, got: usize },
    /// A cutoff scale that must live on the torus exceeded 1/2.
    #[error("cutoff scale {0} exceeds 1/2; the symbol would wrap around the torus")]
    CutoffScale(f64),
    /// Adaptive quadrature exhausted its panel budget before converging.
    #[error(
        "quadrature failed to converge within {panels} panels (last change {last_change:.3e})"
    )]
    QuadratureBudget { panels: usize, last_change: f64 },
    /// The witness-grid refinement check failed.
    #[error("grid refinement check failed: {0}")]
    Refinement(String),
    /// Malformed serialized data.
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
