//! Weight symbols psi and their cocycles along an automorphism orbit.
//!
//! Symbols are exact polynomials (hence continuous up to the sphere); a
//! symbol is treated as invertible when its minimum modulus over a sphere
//! sample set exceeds [`TOL_ZERO`]. The cocycle of (psi, phi) is
//!
//! ```text
//! psi_(k) = prod_{j=0}^{k-1} psi o phi_j          (k > 0)
//! psi_(0) = 1
//! psi_(-k) = 1 / (psi_(k) o phi_{-k})             (k > 0)
//! ```
//!
//! the negative-index convention being forced by the cocycle identity
//! `psi_(m+n) = psi_(m) * psi_(n) o phi_m` and by the inverse formula for
//! weighted composition operators.

use num_complex::Complex64;

use crate::automorphism::Automorphism;
use crate::error::{Error, Result};
use crate::geometry::{MultiIndex, Point};
use crate::sampling::sphere_samples;
use crate::series::{compose_polynomial_with_automorphism, TruncatedSeries};

/// Invertibility threshold for the sampled sphere minimum of |psi|.
pub const TOL_ZERO: f64 = 1e-9;

/// Default number of sphere samples for sup/inf estimates.
pub const DEFAULT_SPHERE_SAMPLES: usize = 2000;

/// Pointwise-evaluable symbol.
pub trait SymbolEval {
    fn dim(&self) -> usize;
    fn eval(&self, z: &Point) -> Result<Complex64>;
}

/// A polynomial weight symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    poly: TruncatedSeries,
}

impl Symbol {
    /// Constant symbol.
    pub fn constant(n: usize, value: Complex64) -> Self {
        Symbol { poly: TruncatedSeries::constant(n, 0, value) }
    }

    /// Build from sparse monomial terms.
    pub fn from_terms(n: usize, terms: &[(MultiIndex, Complex64)]) -> Result<Self> {
        let degree = terms.iter().map(|(a, _)| a.degree()).max().unwrap_or(0);
        let mut poly = TruncatedSeries::zero(n, degree);
        for (alpha, coeff) in terms {
            if alpha.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: alpha.dim() });
            }
            let r = crate::geometry::rank(alpha);
            poly.coeffs_mut()[r] += *coeff;
        }
        Ok(Symbol { poly })
    }

    /// Univariate polynomial in z1, embedded in N variables.
    pub fn univariate_in_first(n: usize, coeffs: &[Complex64]) -> Self {
        let degree = coeffs.len().saturating_sub(1);
        Symbol { poly: TruncatedSeries::from_univariate_in_first(n, degree, coeffs) }
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    /// Exact polynomial degree (highest stored degree).
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn poly(&self) -> &TruncatedSeries {
        &self.poly
    }

    /// The symbol as a degree-D truncated series.
    pub fn to_series(&self, degree: usize) -> TruncatedSeries {
        let mut out = TruncatedSeries::zero(self.dim(), degree);
        let indices = crate::geometry::enumerate_multiindices(self.dim(), self.degree());
        for (i, alpha) in indices.iter().enumerate() {
            if alpha.degree() <= degree {
                out.coeffs_mut()[crate::geometry::rank(alpha)] = self.poly.coeffs()[i];
            }
        }
        out
    }

    /// Minimum of |psi| over a sphere sample set (plus coordinate points).
    ///
    /// The maximum-modulus principle applied to 1/psi reduces the closed-ball
    /// infimum of a zero-free symbol to the sphere; the sampled minimum is an
    /// upper estimate of the true infimum, and the caller decides thresholds.
    pub fn min_modulus_on_sphere(&self, n_samples: usize, seed: u64) -> f64 {
        min_modulus_on_sphere(self, n_samples, seed)
    }

    /// Invertibility of the multiplication part: sampled sphere minimum above
    /// [`TOL_ZERO`].
    pub fn is_invertible(&self, n_samples: usize, seed: u64) -> bool {
        self.min_modulus_on_sphere(n_samples, seed) > TOL_ZERO
    }
}

impl SymbolEval for Symbol {
    fn dim(&self) -> usize {
        self.poly.dim()
    }

    fn eval(&self, z: &Point) -> Result<Complex64> {
        self.poly.evaluate(z)
    }
}

/// Minimum sampled modulus for any evaluable symbol.
pub fn min_modulus_on_sphere(psi: &impl SymbolEval, n_samples: usize, seed: u64) -> f64 {
    let samples = sphere_samples(psi.dim(), n_samples.max(100), seed);
    samples
        .iter()
        .filter_map(|z| psi.eval(z).ok())
        .map(|v| v.norm())
        .fold(f64::INFINITY, f64::min)
}

/// A product of composed symbols `prod_i psi_i(phi_i(z))^{e_i}` with
/// exponents +-1; the closed form for cocycles, compositions and inverses of
/// weighted composition operators, whose weights are generally not
/// polynomials.
#[derive(Debug, Clone)]
pub struct FactoredSymbol {
    factors: Vec<(Symbol, Automorphism, i32)>,
    dim: usize,
}

impl FactoredSymbol {
    pub fn new(dim: usize) -> Self {
        FactoredSymbol { factors: Vec::new(), dim }
    }

    pub fn from_symbol(psi: &Symbol) -> Self {
        let dim = psi.dim();
        FactoredSymbol {
            factors: vec![(psi.clone(), Automorphism::identity(dim), 1)],
            dim,
        }
    }

    pub fn push(&mut self, psi: Symbol, phi: Automorphism, exponent: i32) {
        debug_assert!(exponent == 1 || exponent == -1);
        self.factors.push((psi, phi, exponent));
    }

    pub fn factors(&self) -> &[(Symbol, Automorphism, i32)] {
        &self.factors
    }

    /// Precompose every factor with an automorphism: psi o chi.
    pub fn compose_with(&self, chi: &Automorphism) -> Result<FactoredSymbol> {
        let mut out = FactoredSymbol::new(self.dim);
        for (psi, phi, e) in &self.factors {
            out.push(psi.clone(), phi.compose(chi)?, *e);
        }
        Ok(out)
    }

    /// Expand into a degree-D truncated series (reciprocals for negative
    /// exponents require nonvanishing values along the relevant orbit).
    pub fn to_series(&self, degree: usize) -> Result<TruncatedSeries> {
        let mut out = TruncatedSeries::one(self.dim, degree);
        for (psi, phi, e) in &self.factors {
            let composed = compose_polynomial_with_automorphism(&psi.to_series(degree), phi, degree)?;
            let factor = if *e >= 0 { composed } else { composed.reciprocal()? };
            out = out.mul(&factor)?;
        }
        Ok(out)
    }
}

impl SymbolEval for FactoredSymbol {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, z: &Point) -> Result<Complex64> {
        let mut out = Complex64::ONE;
        for (psi, phi, e) in &self.factors {
            let v = psi.eval(&phi.apply(z)?)?;
            if *e >= 0 {
                out *= v;
            } else {
                if v.norm() < 1e-300 {
                    return Err(Error::SymbolZeroHit { modulus: v.norm() });
                }
                out /= v;
            }
        }
        Ok(out)
    }
}

/// The cocycle psi_(k) as a factored symbol.
pub fn cocycle(psi: &Symbol, phi: &Automorphism, k: i64) -> FactoredSymbol {
    let mut out = FactoredSymbol::new(psi.dim());
    if k > 0 {
        for j in 0..k {
            out.push(psi.clone(), phi.iterate(j), 1);
        }
    } else {
        for j in 1..=(-k) {
            out.push(psi.clone(), phi.iterate(-j), -1);
        }
    }
    out
}

/// Pointwise cocycle value psi_(k)(z), iterating the orbit directly.
pub fn cocycle_eval(
    psi: &Symbol,
    phi: &Automorphism,
    k: i64,
    z: &Point,
) -> Result<Complex64> {
    let mut out = Complex64::ONE;
    if k == 0 {
        return Ok(out);
    }
    if k > 0 {
        let mut w = z.clone();
        for _ in 0..k {
            out *= psi.eval(&w)?;
            w = phi.apply(&w)?;
        }
    } else {
        let inv = phi.inverse();
        let mut w = z.clone();
        for _ in 0..(-k) {
            w = inv.apply(&w)?;
            let v = psi.eval(&w)?;
            if v.norm() < 1e-300 {
                return Err(Error::SymbolZeroHit { modulus: v.norm() });
            }
            out /= v;
        }
    }
    Ok(out)
}

/// The sampled sup-norm growth sequence
/// `r_n = (max over samples |psi_(n)|)^{1/n}`, n = 1..=n_max,
/// accumulated in log-space per sample. The sample set is the sphere sampler
/// output plus the boundary fixed points of phi, where the cocycle modulus is
/// exactly |psi(fixed)|^n.
pub fn cocycle_sup_growth(
    psi: &Symbol,
    phi: &Automorphism,
    n_max: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let report = phi.classify()?;
    if report.kind == crate::automorphism::AutomorphismKind::Elliptic {
        return Err(Error::EllipticUnsupported);
    }
    let mut samples = sphere_samples(psi.dim(), n_samples, seed);
    for p in &report.boundary_fixed {
        // project exactly onto the sphere
        let norm = p.norm();
        samples.push(Point::new(p.coords.iter().map(|c| c / norm).collect()));
    }
    let mut log_acc = vec![0.0f64; samples.len()];
    let mut current = samples;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        for (i, z) in current.iter_mut().enumerate() {
            let v = psi.eval(z)?;
            if v.norm() < 1e-300 {
                return Err(Error::SymbolZeroHit { modulus: v.norm() });
            }
            log_acc[i] += v.norm().ln();
            let mut w = phi.apply(z)?;
            // renormalize onto the sphere to stop drift over long orbits
            let norm = w.norm();
            if norm > 0.0 {
                for c in w.coords.iter_mut() {
                    *c /= Complex64::new(norm, 0.0);
                }
            }
            *z = w;
        }
        let best = log_acc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        out.push((best / n as f64).exp());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SiegelPoint;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_plus_z1(n: usize) -> Symbol {
        Symbol::univariate_in_first(n, &[c(2.0, 0.0), c(1.0, 0.0)])
    }

    #[test]
    fn min_modulus_constant() {
        let psi = Symbol::constant(2, c(0.0, 0.7));
        assert!((psi.min_modulus_on_sphere(500, 0) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn min_modulus_disc_polynomial() {
        // |1 - 0.5 z| attains its minimum 0.5 at z = 1
        let psi = Symbol::univariate_in_first(1, &[c(1.0, 0.0), c(-0.5, 0.0)]);
        let m = psi.min_modulus_on_sphere(2000, 0);
        assert!((m - 0.5).abs() < 1e-6, "sampled minimum {m}");
        assert!(psi.is_invertible(2000, 0));
    }

    #[test]
    fn min_modulus_flags_boundary_zero() {
        // psi = 1 - z vanishes at z = 1, which the grid contains exactly
        let psi = Symbol::univariate_in_first(1, &[c(1.0, 0.0), c(-1.0, 0.0)]);
        let m = psi.min_modulus_on_sphere(2000, 0);
        assert!(m <= TOL_ZERO, "sampled minimum {m}");
        assert!(!psi.is_invertible(2000, 0));
    }

    #[test]
    fn cocycle_identity_small_indices() {
        let psi = two_plus_z1(1);
        let phi = Automorphism::canonical_hyperbolic(1, 0.5, None).unwrap();
        let pts = crate::sampling::ball_samples(1, 12, 0.7, 2);
        for m in -8i64..=8 {
            for n in -8i64..=8 {
                for z in &pts {
                    let lhs = cocycle_eval(&psi, &phi, m + n, z).unwrap();
                    let phim = phi.iterate(m).apply(z).unwrap();
                    let rhs = cocycle_eval(&psi, &phi, m, z).unwrap()
                        * cocycle_eval(&psi, &phi, n, &phim).unwrap();
                    assert!(
                        (lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0),
                        "cocycle identity failed at m={m} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn cocycle_value_at_fixed_point() {
        let psi = two_plus_z1(2);
        let phi = Automorphism::canonical_hyperbolic(2, 0.5, None).unwrap();
        let e1 = Point::e1(2);
        for n in [1i64, 3, 7] {
            let lhs = cocycle_eval(&psi, &phi, n, &e1).unwrap();
            let rhs = psi.eval(&e1).unwrap().powi(n as i32);
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm());
        }
    }

    #[test]
    fn cocycle_inverse_relation() {
        // psi_(1)(phi_{-1}(z)) * psi_(-1)(z) = 1
        let psi = two_plus_z1(1);
        let phi = Automorphism::canonical_hyperbolic(1, 0.4, None).unwrap();
        let z = Point::new(vec![c(0.3, -0.2)]);
        let w = phi.iterate(-1).apply(&z).unwrap();
        let prod = cocycle_eval(&psi, &phi, 1, &w).unwrap() * cocycle_eval(&psi, &phi, -1, &z).unwrap();
        assert!((prod - Complex64::ONE).norm() < 1e-13);
    }

    #[test]
    fn factored_cocycle_matches_pointwise() {
        let psi = two_plus_z1(1);
        let phi = Automorphism::canonical_hyperbolic(1, 0.5, None).unwrap();
        let z = Point::new(vec![c(-0.4, 0.25)]);
        for k in [-3i64, -1, 0, 2, 5] {
            let f = cocycle(&psi, &phi, k);
            let a = f.eval(&z).unwrap();
            let b = cocycle_eval(&psi, &phi, k, &z).unwrap();
            assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
        }
    }

    #[test]
    fn factored_series_expansion_matches_pointwise() {
        let psi = two_plus_z1(1);
        let phi = Automorphism::canonical_hyperbolic(1, 0.5, None).unwrap();
        let f = cocycle(&psi, &phi, 2);
        let series = f.to_series(30).unwrap();
        for re in [-0.4, 0.0, 0.3] {
            let z = Point::new(vec![c(re, 0.2)]);
            let a = series.evaluate(&z).unwrap();
            let b = f.eval(&z).unwrap();
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn growth_constant_symbol() {
        let psi = Symbol::constant(1, c(0.0, 0.8));
        let phi = Automorphism::canonical_hyperbolic(1, 0.5, None).unwrap();
        let r = cocycle_sup_growth(&psi, &phi, 10, 200, 0).unwrap();
        for v in r {
            assert!((v - 0.8).abs() < 1e-12);
        }
    }

    #[test]
    fn growth_hyperbolic_limit() {
        // psi = 2 + z1: limit max{|psi(e1)|, |psi(-e1)|} = 3
        let psi = two_plus_z1(1);
        let phi = Automorphism::canonical_hyperbolic(1, 0.5, None).unwrap();
        let r = cocycle_sup_growth(&psi, &phi, 200, 2000, 0).unwrap();
        let last = r[199];
        assert!((last - 3.0).abs() / 3.0 < 0.02, "r_200 = {last}");
        // lower bound from the fixed-point samples at every n
        for (n, v) in r.iter().enumerate() {
            assert!(*v >= 3.0 - 1e-9, "r_{} = {v} below the fixed-point bound", n + 1);
        }
    }

    #[test]
    fn growth_parabolic_limit() {
        let psi = two_plus_z1(1);
        let a = SiegelPoint::new(vec![c(1.0, 0.0)]);
        let phi = Automorphism::heisenberg_translation(&a, None).unwrap();
        let r = cocycle_sup_growth(&psi, &phi, 400, 2000, 0).unwrap();
        let last = r[399];
        assert!((last - 3.0).abs() / 3.0 < 0.02, "r_400 = {last}");
    }

    #[test]
    fn growth_rejects_elliptic() {
        let psi = two_plus_z1(1);
        let u = crate::linalg::CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::from_polar(1.0, 0.3),
        ]));
        let phi = Automorphism::unitary(u).unwrap();
        assert!(matches!(
            cocycle_sup_growth(&psi, &phi, 10, 100, 0),
            Err(Error::EllipticUnsupported)
        ));
    }
}
