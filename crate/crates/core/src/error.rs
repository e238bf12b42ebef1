//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the numerics, beam, tomography, and entropy layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument that must be finite was NaN or infinite.
    #[error("non-finite input for {0}")]
    NonFinite(&'static str),

    /// Gauss-Hermite rule order outside the supported 1..=200 range.
    #[error("Gauss-Hermite order {0} outside supported range 1..=200")]
    QuadratureOrder(usize),

    /// Invalid quadrature control parameters.
    #[error("invalid quadrature spec: {0}")]
    InvalidQuadratureSpec(String),

    /// The Hermite-Gaussian closed form is singular near alpha^2 = 1; the
    /// caller must fall back to direct quadrature.
    #[error("closed form degenerate: |1 - alpha^2| = {0:.3e} below branch guard")]
    DegenerateBranch(f64),

    /// Node-doubling refinement failed to settle within tolerance.
    #[error("integral did not converge: last refinement moved the value by {change:.3e} (> 10 x {tol:.3e})")]
    NonConvergence { change: f64, tol: f64 },

    /// Integrand phase advances by more than pi between adjacent samples.
    #[error("chirp undersampled on this grid: max phase step {0:.3} rad exceeds pi")]
    ChirpUndersampled(f64),

    /// Mode order or width outside the supported range.
    #[error("invalid mode: {0}")]
    InvalidMode(String),

    /// Sampling grid violates a size or tail-coverage requirement.
    #[error("grid too small: need half-width >= {needed:.4}, got {got:.4}")]
    GridTooSmall { needed: f64, got: f64 },

    /// Invalid uniform-grid axis description.
    #[error("invalid grid axis: {0}")]
    InvalidGrid(String),

    /// Catch-all for out-of-domain scalar arguments.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Free-space propagation would wrap the field around the grid.
    #[error("propagation to z = {z} aliases: predicted extent {predicted:.3} exceeds grid half-span {half_span:.3}")]
    Aliasing { z: f64, predicted: f64, half_span: f64 },

    /// Tomogram query with (mu, nu) = (0, 0) on one axis.
    #[error("degenerate tomogram query on axis {axis}: (mu, nu) = (0, 0)")]
    DegenerateQuery { axis: u8 },

    /// Fresnel tomogram requested with nu = 0.
    #[error("Fresnel tomogram undefined for nu{axis} = 0")]
    FresnelNuZero { axis: u8 },

    /// Tail of a truncated integration domain did not fall below tolerance.
    #[error("truncation did not converge: tail magnitude {tail:.3e} at limit {limit:.3}")]
    Truncation { tail: f64, limit: f64 },

    /// Malformed field file.
    #[error("field parse error at line {line}: {msg}")]
    FieldParse { line: usize, msg: String },

    /// Malformed tomogram query string.
    #[error("query parse error: {0}")]
    QueryParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
