//! Weighted composition operators `C f = psi * (f o phi)` with automorphism
//! symbol `phi` on the Hardy space H^2(B_N) and the weighted Bergman spaces
//! A^2_alpha(B_N) of the unit ball.
//!
//! The crate provides:
//!
//! - exact algebra of ball automorphisms (composition, iteration, fixed-point
//!   classification, hyperbolic and parabolic normal forms),
//! - truncated multivariate power-series arithmetic and finite truncations of
//!   the operators on the monomial basis,
//! - closed-form spectrum predictions for invertible operators with
//!   fixed-point-free symbol (annulus in the hyperbolic case, circle in the
//!   parabolic case),
//! - constructive spectral witnesses: forward eigenfunctions, adjoint kernel
//!   eigenvectors and parabolic approximate eigenvectors with their
//!   quantitative residual bounds,
//! - a verification suite of exact identities used by the CLI and the
//!   acceptance tests.
//!
//! Finite truncations of these non-normal operators do not reproduce
//! infinite-dimensional spectra; truncation eigenvalue scatter is diagnostic
//! output, never a spectral claim.

pub mod automorphism;
pub mod constructions;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod operator;
pub mod sampling;
pub mod series;
pub mod space;
pub mod spectrum;
pub mod symbol;
pub mod verification;

pub use automorphism::{Automorphism, AutomorphismKind, FixedPointReport};
pub use error::{Error, Result};
pub use geometry::{
    cayley, cayley_inverse, enumerate_multiindices, inner, pseudo_hyperbolic_distance,
    CayleyImage, MultiIndex, Point, SiegelPoint,
};
pub use operator::TruncatedOperator;
pub use series::{kernel_series, TruncatedSeries};
pub use space::SpaceParams;
pub use spectrum::{PointSpectrumNote, SpectrumPrediction, SpectrumShape};
pub use symbol::{FactoredSymbol, Symbol, SymbolEval};
