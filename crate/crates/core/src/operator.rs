//! Finite truncations of weighted composition operators on the orthonormal
//! monomial basis e_alpha = z^alpha / ||z^alpha||.
//!
//! Column alpha of the matrix holds the coefficients of `psi * (z^alpha o phi)`
//! projected onto degrees <= D. The truncation is a compression, not an
//! invariant subspace (phi does not fix 0), so matrix-against-matrix checks
//! are restricted to low-degree columns where the compression is accurate.
//!
//! Columns are assembled iteratively, `col(alpha) = col(alpha - e_j) * row_j / L`;
//! every intermediate is a bounded holomorphic function, which keeps the
//! assembly stable at high degree (expanding numerator powers directly
//! cancels catastrophically).

use num_complex::Complex64;

use crate::automorphism::Automorphism;
use crate::error::{Error, Result};
use crate::geometry::{enumerate_multiindices, rank, Point};
use crate::linalg::{self, CMatrix, CVector, Eigensolver};
use crate::series::{kernel_series, TruncatedSeries};
use crate::space::SpaceParams;
use crate::symbol::{FactoredSymbol, Symbol, SymbolEval, TOL_ZERO};

/// Dense truncation of C_{psi,phi} on degrees <= D.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    sp: SpaceParams,
    degree: usize,
    matrix: CMatrix,
    norms: Vec<f64>,
}

impl TruncatedOperator {
    /// Assemble the truncation of `f -> psi * (f o phi)`.
    pub fn build(psi: &Symbol, phi: &Automorphism, sp: SpaceParams, degree: usize) -> Result<Self> {
        Self::build_from_symbol_series(&psi.to_series(degree), phi, sp, degree)
    }

    /// Assemble with an arbitrary degree-D symbol expansion (used for cocycle
    /// and composite symbols, which are not polynomials).
    pub fn build_from_symbol_series(
        symbol: &TruncatedSeries,
        phi: &Automorphism,
        sp: SpaceParams,
        degree: usize,
    ) -> Result<Self> {
        let n = sp.n;
        if phi.dim() != n || symbol.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: phi.dim() });
        }
        let indices = enumerate_multiindices(n, degree);
        let count = indices.len();
        let norms: Vec<f64> = sp.norm_sq_table(degree).iter().map(|v| v.sqrt()).collect();
        let recip_l = phi.denominator_series(degree)?.reciprocal()?;
        let rows: Vec<TruncatedSeries> =
            (0..n).map(|j| phi.numerator_series(j, degree).mul(&recip_l).expect("same ring")).collect();
        // iterative powers: z^alpha o phi = (z^{alpha - e_j} o phi) * rows[j]
        let mut powers: Vec<TruncatedSeries> = Vec::with_capacity(count);
        powers.push(TruncatedSeries::one(n, degree));
        for (i, alpha) in indices.iter().enumerate().skip(1) {
            let j = alpha
                .exponents
                .iter()
                .position(|&e| e > 0)
                .expect("nonzero index has a positive exponent");
            let mut parent = alpha.clone();
            parent.exponents[j] -= 1;
            let parent_rank = rank(&parent);
            debug_assert!(parent_rank < i);
            powers.push(powers[parent_rank].mul(&rows[j])?);
        }
        let mut matrix = CMatrix::zeros(count, count);
        for (col, power) in powers.iter().enumerate() {
            let series = power.mul(symbol)?;
            for (row, c) in series.coeffs().iter().enumerate() {
                matrix[(row, col)] = c * norms[row] / norms[col];
            }
        }
        Ok(TruncatedOperator { sp, degree, matrix, norms })
    }

    pub fn space(&self) -> SpaceParams {
        self.sp
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// Orthonormal coordinates of a series: c_alpha = f_alpha ||z^alpha||.
    pub fn coordinates(&self, f: &TruncatedSeries) -> Result<CVector> {
        if f.dim() != self.sp.n || f.degree() != self.degree {
            return Err(Error::DimensionMismatch { expected: self.degree, got: f.degree() });
        }
        Ok(CVector::from_iterator(
            self.size(),
            f.coeffs().iter().zip(&self.norms).map(|(c, w)| c * *w),
        ))
    }

    /// Series from orthonormal coordinates.
    pub fn series_from_coordinates(&self, v: &CVector) -> TruncatedSeries {
        let mut f = TruncatedSeries::zero(self.sp.n, self.degree);
        for ((out, c), w) in f.coeffs_mut().iter_mut().zip(v.iter()).zip(&self.norms) {
            *out = c / *w;
        }
        f
    }

    /// Matrix action on a series through orthonormal coordinates.
    pub fn apply_series(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        let v = self.coordinates(f)?;
        Ok(self.series_from_coordinates(&(&self.matrix * v)))
    }

    /// Eigenvalues of the truncation via the default dense solver.
    ///
    /// Finite sections of these non-normal operators do not approximate the
    /// operator spectrum; this is diagnostic output.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        self.eigenvalues_with(&linalg::SchurEigensolver)
    }

    pub fn eigenvalues_with(&self, solver: &dyn Eigensolver) -> Result<Vec<Complex64>> {
        solver.eigenvalues(&self.matrix)
    }

    /// The sequence ||M^n||_2^{1/n}, n = 1..=n_max, by repeated multiplication
    /// with Frobenius renormalization (log-scaled to avoid overflow).
    pub fn power_norm_growth(&self, n_max: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n_max);
        let mut b = self.matrix.clone();
        let mut log_scale = 0.0f64;
        for n in 1..=n_max {
            let sigma = linalg::spectral_norm(&b);
            out.push(((sigma.ln() + log_scale) / n as f64).exp());
            if n < n_max {
                let f = b.norm();
                log_scale += f.ln();
                b /= Complex64::new(f, 0.0);
                b = &self.matrix * b;
            }
        }
        out
    }
}

/// Direct series-space application `psi * (f o phi)` truncated at the degree
/// of `f`; agrees with the matrix action on coefficient vectors.
pub fn apply_operator_series(
    psi: &Symbol,
    phi: &Automorphism,
    f: &TruncatedSeries,
) -> Result<TruncatedSeries> {
    let degree = f.degree();
    let composed = crate::series::compose_polynomial_with_automorphism(f, phi, degree)?;
    composed.mul(&psi.to_series(degree))
}

/// The adjoint action on a normalized point-evaluation kernel:
/// `C^* K_z = conj(psi(z)) K_{phi(z)}`, returned as a degree-D series.
///
/// Requires |z| <= 0.8 and a degree large enough that the kernel tail beyond
/// D is below the stated tolerance at phi(z).
pub fn adjoint_on_kernel(
    psi: &Symbol,
    phi: &Automorphism,
    sp: SpaceParams,
    z: &Point,
    degree: usize,
) -> Result<TruncatedSeries> {
    if z.norm() > 0.8 + 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "adjoint kernel action requires |z| <= 0.8, got {}",
            z.norm()
        )));
    }
    let image = phi.apply(z)?;
    let tail = kernel_tail_estimate(image.norm(), sp.two_k(), degree);
    if tail > 1e-6 {
        return Err(Error::KernelTailTooLarge { degree, norm: image.norm(), tail });
    }
    let value = psi.eval(z)?.conj();
    Ok(kernel_series(&image, sp.two_k(), degree).scale(value))
}

/// Relative L2 mass of the kernel K_w beyond degree D, estimated from the
/// geometric-like coefficient decay: tail_k ~ ((2K)_k / k!) |w|^{2k}.
pub fn kernel_tail_estimate(w_norm: f64, two_k: f64, degree: usize) -> f64 {
    let t = (w_norm * w_norm).min(1.0 - 1e-12);
    let mut c = 1.0f64; // (2K)_k / k!
    let mut head = 0.0f64;
    let mut term = 1.0f64; // c_k * t^k
    for k in 0..=degree {
        head += term;
        c *= (two_k + k as f64) / (k as f64 + 1.0);
        term = c * t.powi(k as i32 + 1);
    }
    // geometric bound on the remainder with ratio r = t * (1 + 2K/(D+1))
    let ratio = t * (1.0 + two_k / (degree as f64 + 1.0));
    let tail = if ratio < 1.0 { term / (1.0 - ratio) } else { f64::INFINITY };
    tail / (head + tail)
}

/// Symbol and automorphism of the product `C_{psi1,phi1} C_{psi2,phi2}`:
/// `(psi1 * psi2 o phi1, phi2 o phi1)`.
pub fn compose_wco(
    psi1: &Symbol,
    phi1: &Automorphism,
    psi2: &Symbol,
    phi2: &Automorphism,
) -> Result<(FactoredSymbol, Automorphism)> {
    let n = phi1.dim();
    let mut sym = FactoredSymbol::new(n);
    sym.push(psi1.clone(), Automorphism::identity(n), 1);
    sym.push(psi2.clone(), phi1.clone(), 1);
    Ok((sym, phi2.compose(phi1)?))
}

/// Symbol and automorphism of the inverse: `(1/(psi o phi^{-1}), phi^{-1})`.
/// The symbol must be bounded away from zero.
pub fn inverse_wco(psi: &Symbol, phi: &Automorphism) -> Result<(FactoredSymbol, Automorphism)> {
    let min_mod = psi.min_modulus_on_sphere(crate::symbol::DEFAULT_SPHERE_SAMPLES, 0);
    if min_mod <= TOL_ZERO {
        return Err(Error::SymbolNotInvertible { min_modulus: min_mod, tol: TOL_ZERO });
    }
    let inv = phi.inverse();
    let mut sym = FactoredSymbol::new(phi.dim());
    sym.push(psi.clone(), inv.clone(), -1);
    Ok((sym, inv))
}
