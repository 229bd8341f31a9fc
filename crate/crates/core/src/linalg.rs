//! Dense complex linear algebra helpers.
//!
//! Eigenvalue computation is delegated to a backward-stable dense solver
//! behind the [`Eigensolver`] trait; the default implementation wraps
//! nalgebra's complex Schur decomposition. Nothing in this crate implements
//! QR iteration itself.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Minimal contract for a dense non-Hermitian eigensolver: matrix in,
/// eigenvalue list out.
pub trait Eigensolver {
    fn eigenvalues(&self, a: &CMatrix) -> Result<Vec<Complex64>>;
}

/// Default solver backed by nalgebra's Schur decomposition.
#[derive(Debug, Default, Clone, Copy)]
pub struct SchurEigensolver;

impl Eigensolver for SchurEigensolver {
    fn eigenvalues(&self, a: &CMatrix) -> Result<Vec<Complex64>> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(Error::EigensolverFailure(format!("matrix is {}x{}", n, a.ncols())));
        }
        if !a.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::EigensolverFailure("matrix has non-finite entries".into()));
        }
        a.clone().schur().eigenvalues().map(|v| v.as_slice().to_vec()).ok_or_else(|| {
            let norm = a.norm();
            Error::EigensolverFailure(format!(
                "Schur iteration did not converge (matrix size {n}, Frobenius norm {norm:.3e})"
            ))
        })
    }
}

/// Eigenvalues with the default solver.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    SchurEigensolver.eigenvalues(a)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &CMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Orthonormal basis of the numerical null space of `a`: right singular
/// vectors whose singular value is below `tol` (absolute).
pub fn null_space_basis(a: &CMatrix, tol: f64) -> Vec<CVector> {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol {
            out.push(vt.row(i).conjugate().transpose());
        }
    }
    out
}

/// Spectral norm (largest singular value) via power iteration on A^H A.
///
/// Deterministic start vector; 60 iterations are plenty for the growth
/// diagnostics this backs.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = CVector::from_fn(n, |i, _| {
        Complex64::new(1.0 + (i as f64 * 0.7).sin() * 0.3, (i as f64 * 1.3).cos() * 0.3)
    });
    v /= Complex64::new(v.norm(), 0.0);
    let ah = a.adjoint();
    let mut sigma_sq = 0.0;
    for _ in 0..60 {
        let w = &ah * (a * &v);
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        sigma_sq = nw;
        v = w / Complex64::new(nw, 0.0);
    }
    sigma_sq.sqrt()
}

/// Frobenius defect of unitarity ||U^H U - I||.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}
