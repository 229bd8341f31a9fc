//! Truncated multivariate power series.
//!
//! A `TruncatedSeries` stores dense coefficients for every monomial of total
//! degree <= D in graded-lex order (see [`crate::geometry::enumerate_multiindices`]).
//! Truncation is by total degree everywhere, so products, reciprocals and
//! fractional powers agree with the degree-<=D part of the exact result.
//!
//! Multiplication uses a cached rank table per (dimension, degree) pair; the
//! table maps a pair of monomial ranks to the rank of the product monomial.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::automorphism::Automorphism;
use crate::error::{Error, Result};
use crate::geometry::{enumerate_multiindices, index_count, MultiIndex, Point};

/// Shared per-(n, degree) enumeration and product-rank table.
struct IndexTable {
    indices: Vec<MultiIndex>,
    degrees: Vec<u8>,
    /// product_rank[i * len + j] = rank of indices[i] + indices[j], or u32::MAX
    /// when the sum exceeds the truncation degree.
    product_rank: Vec<u32>,
}

type TableCache = Mutex<HashMap<(usize, usize), Arc<IndexTable>>>;

fn table(n: usize, degree: usize) -> Arc<IndexTable> {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, degree))
        .or_insert_with(|| {
            let indices = enumerate_multiindices(n, degree);
            let len = indices.len();
            let degrees: Vec<u8> = indices.iter().map(|i| i.degree() as u8).collect();
            let mut product_rank = vec![u32::MAX; len * len];
            for i in 0..len {
                for j in 0..len {
                    if (degrees[i] as usize) + (degrees[j] as usize) <= degree {
                        let sum = indices[i].add(&indices[j]);
                        product_rank[i * len + j] = crate::geometry::rank(&sum) as u32;
                    }
                }
            }
            Arc::new(IndexTable { indices, degrees, product_rank })
        })
        .clone()
}

/// Multivariate power series truncated at a total degree.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    dim: usize,
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries {
    pub fn zero(dim: usize, degree: usize) -> Self {
        TruncatedSeries { dim, degree, coeffs: vec![Complex64::ZERO; index_count(dim, degree)] }
    }

    pub fn constant(dim: usize, degree: usize, value: Complex64) -> Self {
        let mut s = Self::zero(dim, degree);
        s.coeffs[0] = value;
        s
    }

    pub fn one(dim: usize, degree: usize) -> Self {
        Self::constant(dim, degree, Complex64::ONE)
    }

    /// The monomial z^alpha (zero if deg alpha > degree).
    pub fn monomial(dim: usize, degree: usize, alpha: &MultiIndex) -> Self {
        let mut s = Self::zero(dim, degree);
        if alpha.degree() <= degree {
            s.coeffs[crate::geometry::rank(alpha)] = Complex64::ONE;
        }
        s
    }

    /// Affine series c0 + sum_j c_j z_j.
    pub fn affine(dim: usize, degree: usize, c0: Complex64, linear: &[Complex64]) -> Self {
        assert_eq!(linear.len(), dim);
        let mut s = Self::zero(dim, degree);
        s.coeffs[0] = c0;
        if degree >= 1 {
            for (j, c) in linear.iter().enumerate() {
                s.coeffs[crate::geometry::rank(&MultiIndex::unit(dim, j))] = *c;
            }
        }
        s
    }

    /// Embed univariate coefficients (in the first variable) into N variables.
    pub fn from_univariate_in_first(dim: usize, degree: usize, coeffs: &[Complex64]) -> Self {
        let mut s = Self::zero(dim, degree);
        for (k, c) in coeffs.iter().enumerate().take(degree + 1) {
            let mut e = vec![0usize; dim];
            e[0] = k;
            s.coeffs[crate::geometry::rank(&MultiIndex::new(e))] = *c;
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Complex64 {
        if alpha.degree() > self.degree {
            return Complex64::ZERO;
        }
        self.coeffs[crate::geometry::rank(alpha)]
    }

    pub fn constant_term(&self) -> Complex64 {
        self.coeffs[0]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        if self.degree != other.degree {
            return Err(Error::DimensionMismatch { expected: self.degree, got: other.degree });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn add_assign_scaled(&mut self, other: &Self, factor: Complex64) {
        debug_assert_eq!(self.dim, other.dim);
        debug_assert_eq!(self.degree, other.degree);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += factor * b;
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.coeffs.iter_mut() {
            *a *= factor;
        }
        out
    }

    /// Cauchy product truncated at the common degree.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let tbl = table(self.dim, self.degree);
        let len = self.coeffs.len();
        let mut out = Self::zero(self.dim, self.degree);
        for i in 0..len {
            let a = self.coeffs[i];
            if a == Complex64::ZERO {
                continue;
            }
            let row = &tbl.product_rank[i * len..(i + 1) * len];
            for (r, b) in row.iter().zip(&other.coeffs) {
                if *r != u32::MAX {
                    out.coeffs[*r as usize] += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse modulo degree truncation, by Newton iteration.
    ///
    /// Requires |f(0)| > 1e-14.
    pub fn reciprocal(&self) -> Result<Self> {
        let f0 = self.constant_term();
        if f0.norm() <= 1e-14 {
            return Err(Error::VanishingConstantTerm { modulus: f0.norm() });
        }
        // x <- x (2 - f x), doubling the number of correct degrees
        let mut x = Self::constant(self.dim, self.degree, f0.inv());
        let two = Self::constant(self.dim, self.degree, Complex64::new(2.0, 0.0));
        let mut correct = 0usize; // degrees 0..=correct are exact
        while correct < self.degree {
            let fx = self.mul(&x)?;
            x = x.mul(&two.sub(&fx)?)?;
            correct = 2 * correct + 1;
        }
        Ok(x)
    }

    /// Natural logarithm as a series; requires Re f(0) > 0 (principal branch).
    pub fn log(&self) -> Result<Self> {
        let f0 = self.constant_term();
        if f0.re <= 0.0 {
            return Err(Error::NonPositiveConstantTerm { re: f0.re });
        }
        // u = f/f0 - 1 has zero constant term; log f = Log f0 + sum (-1)^{m+1} u^m / m
        let mut u = self.scale(f0.inv());
        u.coeffs[0] = Complex64::ZERO;
        let mut out = Self::constant(self.dim, self.degree, f0.ln());
        let mut power = u.clone();
        for m in 1..=self.degree {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            out.add_assign_scaled(&power, Complex64::new(sign / m as f64, 0.0));
            if m < self.degree {
                power = power.mul(&u)?;
            }
        }
        Ok(out)
    }

    /// Exponential of a series (any constant term).
    pub fn exp(&self) -> Result<Self> {
        let v0 = self.constant_term();
        let mut v = self.clone();
        v.coeffs[0] = Complex64::ZERO;
        let mut out = Self::one(self.dim, self.degree);
        let mut power = Self::one(self.dim, self.degree);
        let mut inv_fact = 1.0f64;
        for m in 1..=self.degree {
            power = power.mul(&v)?;
            inv_fact /= m as f64;
            out.add_assign_scaled(&power, Complex64::new(inv_fact, 0.0));
        }
        Ok(out.scale(v0.exp()))
    }

    /// Principal-branch power f^p = exp(p log f); requires Re f(0) > 0.
    ///
    /// For integer p this matches the repeated product.
    pub fn binomial_power(&self, p: f64) -> Result<Self> {
        if (p - 1.0).abs() < 1e-15 {
            return Ok(self.clone());
        }
        self.log()?.scale(Complex64::new(p, 0.0)).exp()
    }

    /// Integer power by binary exponentiation.
    pub fn pow_int(&self, k: usize) -> Result<Self> {
        let mut acc = Self::one(self.dim, self.degree);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Keep only the homogeneous part of degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        let tbl = table(self.dim, self.degree);
        let mut out = Self::zero(self.dim, self.degree);
        for (i, c) in self.coeffs.iter().enumerate() {
            if tbl.degrees[i] as usize == d {
                out.coeffs[i] = *c;
            }
        }
        out
    }

    /// Pointwise evaluation.
    pub fn evaluate(&self, z: &Point) -> Result<Complex64> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: z.dim() });
        }
        // power table: powers[j][k] = z_j^k
        let powers: Vec<Vec<Complex64>> = z
            .coords
            .iter()
            .map(|&c| {
                let mut v = Vec::with_capacity(self.degree + 1);
                let mut acc = Complex64::ONE;
                for _ in 0..=self.degree {
                    v.push(acc);
                    acc *= c;
                }
                v
            })
            .collect();
        let tbl = table(self.dim, self.degree);
        let mut sum = Complex64::ZERO;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == Complex64::ZERO {
                continue;
            }
            let mut term = *c;
            for (j, &e) in tbl.indices[i].exponents.iter().enumerate() {
                term *= powers[j][e];
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Max coefficient modulus (diagnostic).
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// The series of z^alpha composed with an automorphism, truncated at `degree`.
///
/// With phi = (A z + b) / L(z), L affine with L(0) != 0, the result is
/// `prod_j (A_j z + b_j)^{alpha_j} * (1/L)^{|alpha|}`. Numerator factors are
/// accumulated by repeated multiplication: each factor has O(1) coefficients,
/// which keeps the assembly stable (expanding (A_j z + b_j)^{alpha_j} by
/// binomials first would cancel catastrophically at high degree).
pub fn compose_monomial_with_automorphism(
    alpha: &MultiIndex,
    phi: &Automorphism,
    degree: usize,
) -> Result<TruncatedSeries> {
    let n = phi.dim();
    if alpha.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: alpha.dim() });
    }
    let recip_l = phi.denominator_series(degree)?.reciprocal()?;
    let mut out = TruncatedSeries::one(n, degree);
    for (j, &e) in alpha.exponents.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let row = phi.numerator_series(j, degree);
        for _ in 0..e {
            out = out.mul(&row)?;
            out = out.mul(&recip_l)?;
        }
    }
    Ok(out)
}

/// Composition of a polynomial (given as a truncated series holding exact
/// coefficients) with an automorphism, truncated at `degree`.
pub fn compose_polynomial_with_automorphism(
    poly: &TruncatedSeries,
    phi: &Automorphism,
    degree: usize,
) -> Result<TruncatedSeries> {
    let n = phi.dim();
    if poly.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: poly.dim() });
    }
    let recip_l = phi.denominator_series(degree)?.reciprocal()?;
    let rows: Vec<TruncatedSeries> = (0..n).map(|j| phi.numerator_series(j, degree)).collect();
    let indices = enumerate_multiindices(n, poly.degree());
    let mut out = TruncatedSeries::zero(n, degree);
    for (i, alpha) in indices.iter().enumerate() {
        let c = poly.coeffs()[i];
        if c == Complex64::ZERO {
            continue;
        }
        let mut term = TruncatedSeries::one(n, degree);
        for (j, &e) in alpha.exponents.iter().enumerate() {
            for _ in 0..e {
                term = term.mul(&rows[j])?;
                term = term.mul(&recip_l)?;
            }
        }
        out.add_assign_scaled(&term, c);
    }
    Ok(out)
}

/// Reproducing-kernel series `K_w(z) = (1 - <z,w>)^{-2K}` truncated at `degree`.
///
/// Coefficient of z^beta is `poch(2K, |beta|) / beta! * multinomial * conj(w)^beta`,
/// i.e. `(2K)_k / k! * (k! / beta!) * conj(w)^beta` with k = |beta|.
pub fn kernel_series(w: &Point, two_k: f64, degree: usize) -> TruncatedSeries {
    let n = w.dim();
    let indices = enumerate_multiindices(n, degree);
    let mut out = TruncatedSeries::zero(n, degree);
    // poch_over_fact[k] = (2K)_k / k!
    let mut poch_over_fact = Vec::with_capacity(degree + 1);
    let mut acc = 1.0f64;
    poch_over_fact.push(acc);
    for k in 0..degree {
        acc *= (two_k + k as f64) / (k as f64 + 1.0);
        poch_over_fact.push(acc);
    }
    // conj(w) powers per variable
    let powers: Vec<Vec<Complex64>> = w
        .coords
        .iter()
        .map(|&c| {
            let cb = c.conj();
            let mut v = Vec::with_capacity(degree + 1);
            let mut a = Complex64::ONE;
            for _ in 0..=degree {
                v.push(a);
                a *= cb;
            }
            v
        })
        .collect();
    for (i, beta) in indices.iter().enumerate() {
        let k = beta.degree();
        // multinomial k! / beta!
        let mut multinom = 1.0f64;
        let mut used = 0usize;
        for &e in &beta.exponents {
            multinom *= crate::geometry::binomial(used + e, e) as f64;
            used += e;
        }
        let mut wpow = Complex64::ONE;
        for (j, &e) in beta.exponents.iter().enumerate() {
            wpow *= powers[j][e];
        }
        out.coeffs_mut()[i] = poch_over_fact[k] * multinom * wpow;
    }
    out
}
