//! The Hilbert spaces H^2(beta, B_N) with beta(n)^2 = (1+n)^{1-gamma}.
//!
//! gamma = 1 is the Hardy space H^2(B_N); gamma > 1 is the weighted Bergman
//! space A^2_{gamma-2}(B_N) equipped with its exact norm (the beta-weighted
//! norm is kept only for equivalence diagnostics). The kernel exponent is
//!
//! ```text
//! K = (N - 1 + gamma) / 2,    K_w(z) = (1 - <z,w>)^{-2K},
//! ||K_w|| = (1 - |w|^2)^{-K}
//! ```
//!
//! Monomial norms: ||z^a||^2 = a! Gamma(2K) / Gamma(2K + |a|), evaluated via
//! log-gamma so that degrees near 100 do not overflow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{enumerate_multiindices, MultiIndex, Point};
use crate::series::TruncatedSeries;

/// Space parameters (N, gamma) with the derived kernel exponent K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub n: usize,
    pub gamma: f64,
}

impl SpaceParams {
    pub fn new(n: usize, gamma: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if gamma < 1.0 || gamma.is_nan() {
            return Err(Error::InvalidParameter(format!("gamma must be >= 1, got {gamma}")));
        }
        Ok(SpaceParams { n, gamma })
    }

    /// Hardy space of B_N.
    pub fn hardy(n: usize) -> Self {
        SpaceParams { n, gamma: 1.0 }
    }

    /// Kernel exponent K = (N - 1 + gamma)/2.
    pub fn kernel_exponent(&self) -> f64 {
        (self.n as f64 - 1.0 + self.gamma) / 2.0
    }

    /// 2K, the exponent of the reproducing kernel.
    pub fn two_k(&self) -> f64 {
        self.n as f64 - 1.0 + self.gamma
    }

    /// ||z^alpha||^2, strictly positive and decreasing in |alpha|.
    pub fn monomial_norm_sq(&self, alpha: &MultiIndex) -> f64 {
        let two_k = self.two_k();
        let mut log = libm::lgamma(two_k) - libm::lgamma(two_k + alpha.degree() as f64);
        for &e in &alpha.exponents {
            log += libm::lgamma(e as f64 + 1.0);
        }
        log.exp()
    }

    /// Table of ||z^alpha||^2 over the graded-lex enumeration of degree <= d.
    pub fn norm_sq_table(&self, degree: usize) -> Vec<f64> {
        enumerate_multiindices(self.n, degree)
            .iter()
            .map(|a| self.monomial_norm_sq(a))
            .collect()
    }

    /// Inner product of two truncated series in this space.
    pub fn inner_product(&self, f: &TruncatedSeries, g: &TruncatedSeries) -> Result<Complex64> {
        if f.dim() != self.n || g.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: f.dim().max(g.dim()) });
        }
        if f.degree() != g.degree() {
            return Err(Error::DimensionMismatch { expected: f.degree(), got: g.degree() });
        }
        let table = self.norm_sq_table(f.degree());
        Ok(f.coeffs()
            .iter()
            .zip(g.coeffs())
            .zip(&table)
            .map(|((a, b), w)| a * b.conj() * w)
            .sum())
    }

    pub fn norm_sq(&self, f: &TruncatedSeries) -> Result<f64> {
        if f.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: f.dim() });
        }
        let table = self.norm_sq_table(f.degree());
        Ok(f.coeffs().iter().zip(&table).map(|(a, w)| a.norm_sqr() * w).sum())
    }

    pub fn norm(&self, f: &TruncatedSeries) -> Result<f64> {
        Ok(self.norm_sq(f)?.sqrt())
    }

    /// ||K_w|| = (1-|w|^2)^{-K}.
    pub fn kernel_norm(&self, w: &Point) -> Result<f64> {
        let nsq = w.norm_sq();
        if nsq >= 1.0 {
            return Err(Error::PointOnBoundary { norm: nsq.sqrt() });
        }
        Ok((1.0 - nsq).powf(-self.kernel_exponent()))
    }

    pub fn beta_weighted_norm(&self, f: &TruncatedSeries) -> Result<f64> {
        Ok(self.beta_weighted_norm_sq(f)?.sqrt())
    }

    /// The comparison norm sum_s (1+s)^{1-gamma} ||f_s||^2_{H^2}; identical to
    /// the space norm at gamma = 1, equivalent (not equal) for gamma > 1.
    pub fn beta_weighted_norm_sq(&self, f: &TruncatedSeries) -> Result<f64> {
        if f.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: f.dim() });
        }
        let hardy = SpaceParams::hardy(self.n);
        let table = hardy.norm_sq_table(f.degree());
        let indices = enumerate_multiindices(self.n, f.degree());
        let mut out = 0.0;
        for ((c, w), idx) in f.coeffs().iter().zip(&table).zip(&indices) {
            let s = idx.degree() as f64;
            out += (1.0 + s).powf(1.0 - self.gamma) * c.norm_sqr() * w;
        }
        Ok(out)
    }
}
