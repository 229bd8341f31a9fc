//! Closed-form spectrum predictions for invertible weighted composition
//! operators with fixed-point-free automorphism symbol.
//!
//! Hyperbolic phi with Denjoy-Wolff point a, repelling point b and dilation
//! coefficient rho: the spectrum on H^2(beta, B_N) is the annulus
//!
//! ```text
//! min{ |psi(a)| rho^K, |psi(b)| rho^{-K} } <= |lambda| <= max{ ... }
//! ```
//!
//! degenerating to a circle when the two radii agree. Parabolic phi: the
//! circle |lambda| = |psi(a)|. Interior annulus points are eigenvalues of the
//! operator when |psi(a)| rho^K is the larger radius, and of its adjoint when
//! it is the smaller one. Elliptic symbols are a first-class error: the
//! closed forms implemented here do not cover them.

use num_complex::Complex64;
use serde::Serialize;

use crate::automorphism::{Automorphism, AutomorphismKind};
use crate::error::{Error, Result};
use crate::space::SpaceParams;
use crate::symbol::{min_modulus_on_sphere, SymbolEval, DEFAULT_SPHERE_SAMPLES, TOL_ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumShape {
    Annulus { r_min: f64, r_max: f64 },
    Circle { r: f64 },
}

/// Where the point spectrum sits, for interior points of the predicted set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSpectrumNote {
    /// Interior annulus points are eigenvalues of the operator itself.
    InteriorEigenvaluesOfOperator,
    /// Interior annulus points are eigenvalues of the adjoint.
    InteriorEigenvaluesOfAdjoint,
    /// Circle case: the set has no interior; boundary fine structure is not
    /// modeled.
    NoInterior,
}

/// Closed-form spectral prediction with its input echo.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumPrediction {
    pub shape: SpectrumShape,
    pub point_spectrum: PointSpectrumNote,
    pub kind: AutomorphismKind,
    /// |psi| at the Denjoy-Wolff point.
    pub psi_at_dw: f64,
    /// |psi| at the repelling fixed point (hyperbolic only).
    pub psi_at_other: Option<f64>,
    pub rho: f64,
    pub kernel_exponent: f64,
}

impl SpectrumPrediction {
    pub fn radii(&self) -> (f64, f64) {
        match self.shape {
            SpectrumShape::Annulus { r_min, r_max } => (r_min, r_max),
            SpectrumShape::Circle { r } => (r, r),
        }
    }
}

/// Relative tolerance at which the two hyperbolic radii are considered equal.
const CIRCLE_COLLAPSE_TOL: f64 = 1e-12;

/// Predict the spectrum of C_{psi,phi} on H^2(beta, B_N).
///
/// `psi` must be bounded away from zero and `phi` fixed-point-free.
pub fn predict(
    psi: &impl SymbolEval,
    phi: &Automorphism,
    sp: SpaceParams,
) -> Result<SpectrumPrediction> {
    let min_mod = min_modulus_on_sphere(psi, DEFAULT_SPHERE_SAMPLES, 0);
    if min_mod <= TOL_ZERO {
        return Err(Error::SymbolNotInvertible { min_modulus: min_mod, tol: TOL_ZERO });
    }
    let report = phi.classify()?;
    let k = sp.kernel_exponent();
    match report.kind {
        AutomorphismKind::Elliptic => Err(Error::EllipticUnsupported),
        AutomorphismKind::Parabolic => {
            let dw = report.denjoy_wolff.as_ref().expect("parabolic Denjoy-Wolff point");
            let psi_a = psi.eval(dw)?.norm();
            Ok(SpectrumPrediction {
                shape: SpectrumShape::Circle { r: psi_a },
                point_spectrum: PointSpectrumNote::NoInterior,
                kind: AutomorphismKind::Parabolic,
                psi_at_dw: psi_a,
                psi_at_other: None,
                rho: 1.0,
                kernel_exponent: k,
            })
        }
        AutomorphismKind::Hyperbolic => {
            let dw = report.denjoy_wolff.as_ref().expect("hyperbolic Denjoy-Wolff point");
            let other = &report.boundary_fixed[1];
            let rho = report.rho.expect("hyperbolic rho");
            let psi_a = psi.eval(dw)?.norm();
            let psi_b = psi.eval(other)?.norm();
            let q_dw = psi_a * rho.powf(k);
            let q_other = psi_b * rho.powf(-k);
            let (r_min, r_max) = if q_dw <= q_other { (q_dw, q_other) } else { (q_other, q_dw) };
            let (shape, note) = if (r_max - r_min).abs() <= CIRCLE_COLLAPSE_TOL * r_max {
                (SpectrumShape::Circle { r: r_max }, PointSpectrumNote::NoInterior)
            } else if q_dw > q_other {
                (
                    SpectrumShape::Annulus { r_min, r_max },
                    PointSpectrumNote::InteriorEigenvaluesOfOperator,
                )
            } else {
                (
                    SpectrumShape::Annulus { r_min, r_max },
                    PointSpectrumNote::InteriorEigenvaluesOfAdjoint,
                )
            };
            Ok(SpectrumPrediction {
                shape,
                point_spectrum: note,
                kind: AutomorphismKind::Hyperbolic,
                psi_at_dw: psi_a,
                psi_at_other: Some(psi_b),
                rho,
                kernel_exponent: k,
            })
        }
    }
}

/// The a-priori containment bounds alone (they coincide with the radii of the
/// full prediction).
pub fn radius_bounds(
    psi: &impl SymbolEval,
    phi: &Automorphism,
    sp: SpaceParams,
) -> Result<(f64, f64)> {
    Ok(predict(psi, phi, sp)?.radii())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointLocation {
    Inside,
    OnBoundaryCircle,
    Outside,
}

/// Locate |lambda| relative to the predicted set, with tolerance 1e-12.
pub fn classify_point(lambda: Complex64, prediction: &SpectrumPrediction) -> PointLocation {
    let r = lambda.norm();
    let (lo, hi) = prediction.radii();
    let tol = 1e-12;
    if (r - lo).abs() <= tol || (r - hi).abs() <= tol {
        PointLocation::OnBoundaryCircle
    } else if r > lo && r < hi {
        PointLocation::Inside
    } else {
        PointLocation::Outside
    }
}
