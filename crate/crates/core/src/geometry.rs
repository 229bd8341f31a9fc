//! Points of the unit ball B_N in C^N, the Siegel upper half space, and the
//! pseudo-hyperbolic metric.
//!
//! Conventions:
//!
//! ```text
//! z = (z[1], z')           first coordinate + tail in C^{N-1}
//! <z,w> = sum_j z_j conj(w_j)
//! 1 - d(z,w)^2 = (1-|z|^2)(1-|w|^2) / |1 - <z,w>|^2
//! Phi(z) = i (e1 + z) / (1 - z[1])     Cayley transform onto
//! H_N = { w : Im w[1] > |w'|^2 }
//! ```
//!
//! `Phi` has a pole at `z[1] = 1`; the image of `e1` is reported as an
//! explicit point at infinity rather than as large floats.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sphere membership tolerance: `on_sphere` means ||z| - 1| <= EPS_BOUNDARY.
pub const EPS_BOUNDARY: f64 = 1e-9;

/// Strict-interior margin used before evaluating kernel quantities, which
/// scale like (1 - |z|^2)^{-K}.
pub const EPS_INTERIOR: f64 = 1e-12;

/// A point of C^N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<Complex64>,
}

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Self {
        Point { coords }
    }

    pub fn zero(dim: usize) -> Self {
        Point { coords: vec![Complex64::ZERO; dim] }
    }

    /// The point e1 = (1, 0').
    pub fn e1(dim: usize) -> Self {
        let mut coords = vec![Complex64::ZERO; dim];
        coords[0] = Complex64::ONE;
        Point { coords }
    }

    /// Real scalar multiple of e1.
    pub fn scaled_e1(dim: usize, t: f64) -> Self {
        let mut coords = vec![Complex64::ZERO; dim];
        coords[0] = Complex64::new(t, 0.0);
        Point { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn in_open_ball(&self) -> bool {
        self.norm() < 1.0
    }

    pub fn on_sphere(&self) -> bool {
        (self.norm() - 1.0).abs() <= EPS_BOUNDARY
    }

    /// Strict interior: |z| < 1 - EPS_INTERIOR.
    pub fn strictly_interior(&self) -> bool {
        self.norm() < 1.0 - EPS_INTERIOR
    }

    pub fn first(&self) -> Complex64 {
        self.coords[0]
    }

    /// Euclidean distance to another point.
    pub fn dist(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }
}

/// A point of the Siegel upper half space H_N (or its boundary).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiegelPoint {
    pub coords: Vec<Complex64>,
}

impl SiegelPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        SiegelPoint { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn first(&self) -> Complex64 {
        self.coords[0]
    }

    /// |w'|^2 over the last N-1 coordinates.
    pub fn tail_norm_sq(&self) -> f64 {
        self.coords[1..].iter().map(|c| c.norm_sqr()).sum()
    }

    /// Im w[1] > |w'|^2.
    pub fn in_half_space(&self) -> bool {
        self.first().im > self.tail_norm_sq()
    }

    /// Signed boundary defect Im w[1] - |w'|^2 (zero on the boundary).
    pub fn boundary_defect(&self) -> f64 {
        self.first().im - self.tail_norm_sq()
    }
}

/// Image of a ball point under the Cayley transform: either a finite Siegel
/// point or the point at infinity (image of e1).
#[derive(Debug, Clone, PartialEq)]
pub enum CayleyImage {
    Finite(SiegelPoint),
    Infinity,
}

/// Hermitian inner product `<z,w> = sum_j z_j conj(w_j)`.
pub fn inner(z: &Point, w: &Point) -> Result<Complex64> {
    z.check_dim(w)?;
    Ok(z.coords.iter().zip(&w.coords).map(|(a, b)| a * b.conj()).sum())
}

/// Pseudo-hyperbolic distance d(z,w) in [0,1), via the closed identity
/// `1 - d^2 = (1-|z|^2)(1-|w|^2)/|1 - <z,w>|^2`.
///
/// Both points must lie in the open ball. The quotient is clamped into
/// [0,1] before the square root to absorb roundoff.
pub fn pseudo_hyperbolic_distance(z: &Point, w: &Point) -> Result<f64> {
    z.check_dim(w)?;
    let nz = z.norm();
    if nz >= 1.0 {
        return Err(Error::PointOnBoundary { norm: nz });
    }
    let nw = w.norm();
    if nw >= 1.0 {
        return Err(Error::PointOnBoundary { norm: nw });
    }
    let q = (1.0 - z.norm_sq()) * (1.0 - w.norm_sq()) / (Complex64::ONE - inner(z, w)?).norm_sqr();
    let one_minus_d2 = q.clamp(0.0, 1.0);
    Ok((1.0 - one_minus_d2).sqrt())
}

/// Cayley transform `Phi(z) = i (e1 + z)/(1 - z[1])` from the ball onto H_N.
///
/// Returns the tagged point at infinity when z[1] is numerically 1.
pub fn cayley(z: &Point) -> CayleyImage {
    let denom = Complex64::ONE - z.first();
    if denom.norm() < 1e-13 {
        return CayleyImage::Infinity;
    }
    let i = Complex64::I;
    let mut coords = Vec::with_capacity(z.dim());
    coords.push(i * (Complex64::ONE + z.first()) / denom);
    for c in &z.coords[1..] {
        coords.push(i * c / denom);
    }
    CayleyImage::Finite(SiegelPoint::new(coords))
}

/// Inverse Cayley transform: `z[1] = (w[1] - i)/(w[1] + i)`, `z' = 2 w'/(w[1] + i)`.
pub fn cayley_inverse(w: &SiegelPoint) -> Point {
    let i = Complex64::I;
    let denom = w.first() + i;
    let mut coords = Vec::with_capacity(w.dim());
    coords.push((w.first() - i) / denom);
    for c in &w.coords[1..] {
        coords.push(2.0 * c / denom);
    }
    Point::new(coords)
}

// ---------------------------------------------------------------------------
// Multi-indices
// ---------------------------------------------------------------------------

/// A monomial exponent in N variables; total ordering is graded lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub exponents: Vec<usize>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<usize>) -> Self {
        MultiIndex { exponents }
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex { exponents: vec![0; dim] }
    }

    /// Unit index for variable `j`.
    pub fn unit(dim: usize, j: usize) -> Self {
        let mut e = vec![0; dim];
        e[j] = 1;
        MultiIndex { exponents: e }
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> usize {
        self.exponents.iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exponents.cmp(&other.exponents))
    }
}

/// Binomial coefficient as f64-safe u128 (sizes here stay far below overflow).
pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Number of multi-indices in N variables with total degree <= D.
pub fn index_count(n: usize, degree: usize) -> usize {
    binomial(n + degree, n)
}

/// Number of multi-indices in N variables with total degree exactly d.
pub fn homogeneous_count(n: usize, d: usize) -> usize {
    binomial(n + d - 1, n - 1)
}

/// All multi-indices of total degree <= `degree` in graded-lex order.
pub fn enumerate_multiindices(n: usize, degree: usize) -> Vec<MultiIndex> {
    assert!(n >= 1, "dimension must be at least 1");
    let mut out = Vec::with_capacity(index_count(n, degree));
    let mut current = vec![0usize; n];
    for d in 0..=degree {
        emit_degree(&mut out, &mut current, 0, d);
    }
    out
}

fn emit_degree(out: &mut Vec<MultiIndex>, current: &mut Vec<usize>, pos: usize, remaining: usize) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for v in 0..=remaining {
        current[pos] = v;
        emit_degree(out, current, pos + 1, remaining - v);
    }
}

/// Rank of a multi-index in the graded-lex enumeration.
pub fn rank(idx: &MultiIndex) -> usize {
    let n = idx.dim();
    let d = idx.degree();
    // offset of the degree-d block
    let mut r = if d == 0 { 0 } else { index_count(n, d - 1) };
    // lexicographic rank within the block
    let mut remaining = d;
    for i in 0..n - 1 {
        let vars_left = n - 1 - i;
        for v in 0..idx.exponents[i] {
            // indices with exponents[i] = v: compositions of remaining - v
            // into vars_left parts
            r += binomial(remaining - v + vars_left - 1, vars_left - 1);
        }
        remaining -= idx.exponents[i];
    }
    r
}
