//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point must lie in the open unit ball (|z| = {norm})")]
    PointNotInBall { norm: f64 },

    #[error("point lies on or outside the unit sphere (|z| = {norm})")]
    PointOnBoundary { norm: f64 },

    #[error("matrix does not represent a ball automorphism (J-unitarity defect {defect:.3e})")]
    NotAnAutomorphism { defect: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fixed-point classification is numerically ambiguous: {reason} (eigenvalue gaps {gaps:?})")]
    AmbiguousClassification { reason: String, gaps: Vec<f64> },

    #[error("operation requires a hyperbolic automorphism, got {got}")]
    NotHyperbolic { got: String },

    #[error("operation requires a parabolic automorphism, got {got}")]
    NotParabolic { got: String },

    #[error("elliptic symbols are outside the supported spectral theory")]
    EllipticUnsupported,

    #[error("symbol is not bounded away from zero (min modulus {min_modulus:.3e} <= {tol:.1e})")]
    SymbolNotInvertible { min_modulus: f64, tol: f64 },

    #[error("series constant term too small for division ({modulus:.3e})")]
    VanishingConstantTerm { modulus: f64 },

    #[error("binomial power requires Re f(0) > 0, got {re:.3e}")]
    NonPositiveConstantTerm { re: f64 },

    #[error("lambda = {lambda} violates the required spectral regime [{lo:.6e}, {hi:.6e}]")]
    RegimeViolation { lambda: String, lo: f64, hi: f64 },

    #[error("eigenfunction witness is degenerate (norm {norm:.3e} below {tol:.1e})")]
    DegenerateWitness { norm: f64, tol: f64 },

    #[error("separated orbit search exhausted the radius grid (best separation {best:.6} < requested {requested:.6})")]
    SeparationSearchFailed { best: f64, requested: f64 },

    #[error("cocycle modulus band (1 +/- 1/{m}) not reached within {budget} iterations")]
    BandSearchFailed { m: usize, budget: usize },

    #[error("coefficient tail has not converged (|tail| = {tail:.3e}); increase the number of terms")]
    TailNotConverged { tail: f64 },

    #[error("kernel tail beyond degree {degree} too large for |z| = {norm:.4} (relative tail {tail:.3e})")]
    KernelTailTooLarge { degree: usize, norm: f64, tail: f64 },

    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error("evaluation hit a zero of the symbol (|value| = {modulus:.3e})")]
    SymbolZeroHit { modulus: f64 },
}
