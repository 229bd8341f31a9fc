//! The automorphism group of the unit ball B_N.
//!
//! An automorphism is stored as a projective (N+1)x(N+1) matrix M acting on
//! homogeneous coordinates (z, 1):
//!
//! ```text
//! M = [ A  b ]      phi(z) = (A z + b) / (c^T z + d)
//!     [ c^T d ]
//! ```
//!
//! Ball preservation is J-unitarity `M^* J M = J` with J = diag(1,...,1,-1),
//! after scaling. Matrices are normalized so that J-unitarity holds with
//! factor 1 and the bottom-right entry is real positive; composition is then
//! an exact matrix product and fixed points form an eigenproblem.
//!
//! Fixed-point-free automorphisms fall into two classes, distinguished by
//! their boundary fixed-point count: hyperbolic (two, one attracting
//! Denjoy-Wolff point and one repelling) and parabolic (one). The attracting
//! point has boundary Jacobian of spectral radius < 1; the dilation
//! coefficient rho is the spectral radius at the repelling point.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{inner, Point, SiegelPoint};
use crate::linalg::{self, CMatrix, CVector};
use crate::series::TruncatedSeries;

const J_UNITARITY_TOL: f64 = 1e-9;
const FIXED_POINT_COALESCE: f64 = 1e-8;
const INTERIOR_THRESHOLD: f64 = 1e-8;
const DW_JACOBIAN_MARGIN: f64 = 1e-6;

/// A holomorphic automorphism of B_N, as a normalized projective matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Automorphism {
    n: usize,
    m: CMatrix,
}

/// Classification of an automorphism by its fixed-point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AutomorphismKind {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

impl std::fmt::Display for AutomorphismKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AutomorphismKind::Elliptic => write!(f, "elliptic"),
            AutomorphismKind::Hyperbolic => write!(f, "hyperbolic"),
            AutomorphismKind::Parabolic => write!(f, "parabolic"),
        }
    }
}

/// Fixed-point data of an automorphism.
///
/// Hyperbolic: two boundary points, `denjoy_wolff` attracting, `rho > 1` the
/// spectral radius of the Jacobian at the repelling point, `s = (rho-1)/(rho+1)`.
/// Parabolic: one boundary point, `rho = 1`. Elliptic: an interior fixed point.
#[derive(Debug, Clone, Serialize)]
pub struct FixedPointReport {
    pub kind: AutomorphismKind,
    pub interior_fixed: Option<Point>,
    pub boundary_fixed: Vec<Point>,
    pub denjoy_wolff: Option<Point>,
    pub rho: Option<f64>,
    pub s: Option<f64>,
}

fn j_matrix(n: usize) -> CMatrix {
    let mut j = CMatrix::identity(n + 1, n + 1);
    j[(n, n)] = -Complex64::ONE;
    j
}

impl Automorphism {
    /// Dimension N of the ball.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// The normalized projective matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    fn normalize(mut m: CMatrix) -> Result<CMatrix> {
        let n = m.nrows() - 1;
        let j = j_matrix(n);
        let g = m.adjoint() * &j * &m;
        // lambda from trace(J g) = lambda (n+1)
        let lambda = (&j * &g).trace() / Complex64::new((n + 1) as f64, 0.0);
        if lambda.re <= 0.0 || lambda.im.abs() > 1e-6 * lambda.re.abs().max(1.0) {
            return Err(Error::NotAnAutomorphism { defect: lambda.im.abs().max(1.0) });
        }
        let lam = lambda.re;
        // the Gram entries of g cancel from magnitude ~||M||^2 down to ~lam,
        // so the defect is meaningful only relative to that scale
        let defect = (&g - &j * Complex64::new(lam, 0.0)).norm() / m.norm_squared().max(lam);
        if defect > J_UNITARITY_TOL {
            return Err(Error::NotAnAutomorphism { defect });
        }
        m /= Complex64::new(lam.sqrt(), 0.0);
        Self::normalize_phase(m)
    }

    /// Rotate by a unit scalar so the bottom-right entry is real positive;
    /// it cannot vanish because the denominator of the projective action
    /// never vanishes on the closed ball (|d|^2 - |c|^2 = 1 at lambda = 1).
    fn normalize_phase(mut m: CMatrix) -> Result<CMatrix> {
        let n = m.nrows() - 1;
        let d = m[(n, n)];
        if d.norm() < 1e-12 {
            return Err(Error::NotAnAutomorphism { defect: 1.0 });
        }
        let phase = d / Complex64::new(d.norm(), 0.0);
        m /= phase;
        Ok(m)
    }

    /// Build from a raw projective matrix; validates ball preservation.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        let rows = m.nrows();
        if rows < 2 || m.ncols() != rows {
            return Err(Error::InvalidParameter(format!(
                "automorphism matrix must be square of size >= 2, got {}x{}",
                rows,
                m.ncols()
            )));
        }
        let n = rows - 1;
        Ok(Automorphism { n, m: Self::normalize(m)? })
    }

    pub fn identity(n: usize) -> Self {
        Automorphism { n, m: CMatrix::identity(n + 1, n + 1) }
    }

    /// Unitary automorphism z -> U z.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n {
            return Err(Error::InvalidParameter("unitary block must be square".into()));
        }
        let defect = linalg::unitarity_defect(&u);
        if defect > 1e-12 {
            return Err(Error::NotUnitary { defect });
        }
        let mut m = CMatrix::identity(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&u);
        Self::from_matrix(m)
    }

    /// The involutive automorphism exchanging 0 and `a`:
    ///
    /// ```text
    /// phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z,a>),  s_a = sqrt(1-|a|^2)
    /// ```
    ///
    /// where P_a projects onto the span of a. For a = 0 this is z -> -z.
    pub fn involution(a: &Point) -> Result<Self> {
        let n = a.dim();
        let norm_sq = a.norm_sq();
        if norm_sq >= 1.0 {
            return Err(Error::PointNotInBall { norm: norm_sq.sqrt() });
        }
        let s_a = (1.0 - norm_sq).sqrt();
        let mut m = CMatrix::zeros(n + 1, n + 1);
        // A = -(P_a + s_a Q_a) = -(s_a I + (1 - s_a) P_a)
        for i in 0..n {
            for k in 0..n {
                let mut v = Complex64::ZERO;
                if norm_sq > 0.0 {
                    // P_a[i][k] = a_i conj(a_k) / |a|^2
                    v += (1.0 - s_a) * a.coords[i] * a.coords[k].conj() / norm_sq;
                }
                if i == k {
                    v += Complex64::new(s_a, 0.0);
                }
                m[(i, k)] = -v;
            }
            m[(i, n)] = a.coords[i];
            m[(n, i)] = -a.coords[i].conj();
        }
        m[(n, n)] = Complex64::ONE;
        Self::from_matrix(m)
    }

    /// Canonical hyperbolic automorphism fixing +-e1 with Denjoy-Wolff point e1:
    ///
    /// ```text
    /// phi(z) = ( (z[1]+s)/(1+s z[1]),  U sqrt(1-s^2) z' / (1+s z[1]) )
    /// ```
    ///
    /// `u` is an (N-1)x(N-1) unitary (identity when `None`).
    pub fn canonical_hyperbolic(n: usize, s: f64, u: Option<&CMatrix>) -> Result<Self> {
        if !(0.0 < s && s < 1.0) {
            return Err(Error::InvalidParameter(format!("s must lie in (0,1), got {s}")));
        }
        let tail = match u {
            Some(u) => {
                if u.nrows() != n - 1 || u.ncols() != n - 1 {
                    return Err(Error::InvalidParameter(format!(
                        "unitary block must be {}x{}",
                        n - 1,
                        n - 1
                    )));
                }
                let defect = linalg::unitarity_defect(u);
                if defect > 1e-12 {
                    return Err(Error::NotUnitary { defect });
                }
                u.clone()
            }
            None => CMatrix::identity(n - 1, n - 1),
        };
        let root = (1.0 - s * s).sqrt();
        let mut m = CMatrix::zeros(n + 1, n + 1);
        m[(0, 0)] = Complex64::ONE;
        m[(0, n)] = Complex64::new(s, 0.0);
        m[(n, 0)] = Complex64::new(s, 0.0);
        m[(n, n)] = Complex64::ONE;
        for i in 0..n - 1 {
            for k in 0..n - 1 {
                m[(1 + i, 1 + k)] = tail[(i, k)] * root;
            }
        }
        Self::from_matrix(m)
    }

    /// Parabolic automorphism fixing e1, conjugate under the Cayley transform
    /// to the Siegel-space map
    ///
    /// ```text
    /// sigma(w) = (w[1] + a[1] + 2i <U w', a'>,  U w' + a')
    /// ```
    ///
    /// with `a` on the boundary (Im a[1] = |a'|^2, a != 0).
    pub fn heisenberg_translation(a: &SiegelPoint, u: Option<&CMatrix>) -> Result<Self> {
        let n = a.dim();
        let defect = a.boundary_defect();
        if defect.abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "translation parameter must lie on the Siegel boundary (Im a1 - |a'|^2 = {defect:.3e})"
            )));
        }
        if a.coords.iter().map(|c| c.norm()).sum::<f64>() < 1e-14 {
            return Err(Error::InvalidParameter("translation parameter must be nonzero".into()));
        }
        let tail = match u {
            Some(u) => {
                if u.nrows() != n - 1 || u.ncols() != n - 1 {
                    return Err(Error::InvalidParameter(format!(
                        "unitary block must be {}x{}",
                        n - 1,
                        n - 1
                    )));
                }
                let d = linalg::unitarity_defect(u);
                if d > 1e-12 {
                    return Err(Error::NotUnitary { defect: d });
                }
                u.clone()
            }
            None => CMatrix::identity(n - 1, n - 1),
        };
        // affine matrix of sigma on homogeneous Siegel coordinates
        let mut s_hom = CMatrix::identity(n + 1, n + 1);
        s_hom[(0, n)] = a.first();
        for j in 0..n - 1 {
            // row 0, tail columns: 2i conj(a')^T U
            let mut v = Complex64::ZERO;
            for i in 0..n - 1 {
                v += a.coords[1 + i].conj() * tail[(i, j)];
            }
            s_hom[(0, 1 + j)] = Complex64::new(0.0, 2.0) * v;
            s_hom[(1 + j, n)] = a.coords[1 + j];
            for i in 0..n - 1 {
                s_hom[(1 + j, 1 + i)] = tail[(j, i)];
            }
        }
        let c = cayley_matrix(n);
        let c_inv = cayley_inverse_matrix(n);
        Self::from_matrix(c_inv * s_hom * c)
    }

    /// Apply to a point of the closed ball.
    pub fn apply(&self, z: &Point) -> Result<Point> {
        if z.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: z.dim() });
        }
        let mut denom = self.m[(self.n, self.n)];
        for k in 0..self.n {
            denom += self.m[(self.n, k)] * z.coords[k];
        }
        debug_assert!(denom.norm() > 0.0, "denominator vanished for a valid automorphism");
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut num = self.m[(i, self.n)];
            for k in 0..self.n {
                num += self.m[(i, k)] * z.coords[k];
            }
            out.push(num / denom);
        }
        Ok(Point::new(out))
    }

    /// Composition `self o other` (apply `other` first).
    ///
    /// The product of normalized J-unitary representatives is J-unitary with
    /// factor 1 up to roundoff, so only the phase is renormalized here; the
    /// full Gram validation would be ill-conditioned for large hyperbolic
    /// translations (||M||^2 approaching 1/eps).
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(Automorphism { n: self.n, m: Self::normalize_phase(&self.m * &other.m)? })
    }

    /// Group inverse, via the J-unitary identity M^{-1} = J M^* J.
    pub fn inverse(&self) -> Automorphism {
        let j = j_matrix(self.n);
        let m = &j * self.m.adjoint() * &j;
        Automorphism {
            n: self.n,
            m: Self::normalize_phase(m).expect("inverse of a normalized automorphism"),
        }
    }

    /// k-th iterate (negative k iterates the inverse, k = 0 the identity).
    pub fn iterate(&self, k: i64) -> Automorphism {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut exp = k.unsigned_abs();
        let mut acc = Automorphism::identity(self.n);
        let mut pow = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.compose(&pow).expect("compose of valid automorphisms");
            }
            exp >>= 1;
            if exp > 0 {
                pow = pow.compose(&pow).expect("compose of valid automorphisms");
            }
        }
        acc
    }

    /// Complex Jacobian matrix phi'(z), the derivative of the projective
    /// action: `(A L(z) - (A z + b) c^T) / L(z)^2`.
    pub fn jacobian(&self, z: &Point) -> Result<CMatrix> {
        if z.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: z.dim() });
        }
        let n = self.n;
        let mut denom = self.m[(n, n)];
        for k in 0..n {
            denom += self.m[(n, k)] * z.coords[k];
        }
        let mut num = vec![Complex64::ZERO; n];
        for (i, item) in num.iter_mut().enumerate() {
            *item = self.m[(i, n)];
            for k in 0..n {
                *item += self.m[(i, k)] * z.coords[k];
            }
        }
        let d2 = denom * denom;
        let mut jac = CMatrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                jac[(i, k)] = (self.m[(i, k)] * denom - num[i] * self.m[(n, k)]) / d2;
            }
        }
        Ok(jac)
    }

    /// Numerator row j as an affine series `b_j + sum_i A[j][i] z_i`.
    pub(crate) fn numerator_series(&self, j: usize, degree: usize) -> TruncatedSeries {
        let linear: Vec<Complex64> = (0..self.n).map(|i| self.m[(j, i)]).collect();
        TruncatedSeries::affine(self.n, degree, self.m[(j, self.n)], &linear)
    }

    /// Denominator as an affine series `d + sum_i c_i z_i` (constant term
    /// nonzero for any valid automorphism).
    pub(crate) fn denominator_series(&self, degree: usize) -> Result<TruncatedSeries> {
        let linear: Vec<Complex64> = (0..self.n).map(|i| self.m[(self.n, i)]).collect();
        let d = self.m[(self.n, self.n)];
        if d.norm() < 1e-14 {
            return Err(Error::VanishingConstantTerm { modulus: d.norm() });
        }
        Ok(TruncatedSeries::affine(self.n, degree, d, &linear))
    }

    /// Frobenius distance between normalized projective representatives.
    pub fn matrix_distance(&self, other: &Automorphism) -> f64 {
        (&self.m - &other.m).norm()
    }

    /// Classify by fixed points; see [`FixedPointReport`].
    pub fn classify(&self) -> Result<FixedPointReport> {
        let n = self.n;
        let eigs = linalg::eigenvalues(&self.m)?;
        // Cluster eigenvalues before extracting null spaces: a defective
        // (parabolic) eigenvalue of multiplicity m splits numerically by
        // ~eps^{1/m}, so the raw eigenvalues of one Jordan block land ~1e-5
        // apart. The cluster mean recovers the true eigenvalue to O(eps) and
        // the null space at the mean is clean again.
        let scale = self.m.norm().max(1.0);
        let cluster_tol = 3e-5 * scale;
        let mut clusters: Vec<Vec<Complex64>> = Vec::new();
        for e in &eigs {
            match clusters.iter_mut().find(|c| (c[0] - e).norm() < cluster_tol) {
                Some(c) => c.push(*e),
                None => clusters.push(vec![*e]),
            }
        }
        // candidate fixed points from projective eigenvectors
        let mut candidates: Vec<Point> = Vec::new();
        for cluster in &clusters {
            let lam = cluster.iter().sum::<Complex64>() / Complex64::new(cluster.len() as f64, 0.0);
            let shifted = &self.m - CMatrix::identity(n + 1, n + 1) * lam;
            // generous tolerance: vectors are verified against phi afterwards
            let basis = {
                let b = linalg::null_space_basis(&shifted, 1e-8 * scale);
                if b.is_empty() {
                    linalg::null_space_basis(&shifted, 1e-6 * scale)
                } else {
                    b
                }
            };
            for v in basis {
                if let Some(p) = projective_point(&v, n) {
                    if p.norm() <= 1.0 + 1e-6 {
                        if let Ok(image) = self.apply(&p) {
                            if image.dist(&p) <= 1e-7 * (1.0 + p.norm()) {
                                candidates.push(p);
                            }
                        }
                    }
                }
            }
        }
        // coalesce near-duplicates (a parabolic double point arrives twice)
        let mut distinct: Vec<Point> = Vec::new();
        for p in candidates {
            if !distinct.iter().any(|q| q.dist(&p) < FIXED_POINT_COALESCE) {
                distinct.push(p);
            }
        }
        let mut interior: Vec<Point> = Vec::new();
        let mut boundary: Vec<Point> = Vec::new();
        for p in distinct {
            if p.norm() < 1.0 - INTERIOR_THRESHOLD {
                interior.push(p);
            } else {
                boundary.push(p);
            }
        }
        if let Some(fixed) = interior.into_iter().next() {
            return Ok(FixedPointReport {
                kind: AutomorphismKind::Elliptic,
                interior_fixed: Some(fixed),
                boundary_fixed: boundary,
                denjoy_wolff: None,
                rho: None,
                s: None,
            });
        }
        match boundary.len() {
            1 => {
                let dw = boundary[0].clone();
                Ok(FixedPointReport {
                    kind: AutomorphismKind::Parabolic,
                    interior_fixed: None,
                    boundary_fixed: boundary,
                    denjoy_wolff: Some(dw),
                    rho: Some(1.0),
                    s: None,
                })
            }
            2 => {
                let sr0 = linalg::spectral_radius(&self.jacobian(&boundary[0])?)?;
                let sr1 = linalg::spectral_radius(&self.jacobian(&boundary[1])?)?;
                let dw_index = if (sr0 - 1.0).abs() <= DW_JACOBIAN_MARGIN
                    && (sr1 - 1.0).abs() <= DW_JACOBIAN_MARGIN
                {
                    // both Jacobians numerically neutral: decide by iteration
                    self.denjoy_wolff_by_iteration(&boundary)?
                } else if sr0 < sr1 {
                    0
                } else {
                    1
                };
                let other_index = 1 - dw_index;
                let rho = linalg::spectral_radius(&self.jacobian(&boundary[other_index])?)?;
                if rho <= 1.0 + 1e-12 {
                    return Err(Error::AmbiguousClassification {
                        reason: format!("repelling Jacobian spectral radius {rho} is not > 1"),
                        gaps: vec![(sr0 - 1.0).abs(), (sr1 - 1.0).abs()],
                    });
                }
                let s = (rho - 1.0) / (rho + 1.0);
                Ok(FixedPointReport {
                    kind: AutomorphismKind::Hyperbolic,
                    interior_fixed: None,
                    boundary_fixed: vec![
                        boundary[dw_index].clone(),
                        boundary[other_index].clone(),
                    ],
                    denjoy_wolff: Some(boundary[dw_index].clone()),
                    rho: Some(rho),
                    s: Some(s),
                })
            }
            k => {
                let mut gaps: Vec<f64> = Vec::new();
                for (i, a) in eigs.iter().enumerate() {
                    for b in eigs.iter().skip(i + 1) {
                        gaps.push((a - b).norm());
                    }
                }
                gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
                Err(Error::AmbiguousClassification {
                    reason: format!("found {k} boundary fixed points and no interior one"),
                    gaps,
                })
            }
        }
    }

    fn denjoy_wolff_by_iteration(&self, boundary: &[Point]) -> Result<usize> {
        let mut z = Point::zero(self.n);
        for _ in 0..4000 {
            z = self.apply(&z)?;
        }
        let d0 = z.dist(&boundary[0]);
        let d1 = z.dist(&boundary[1]);
        if (d0 - d1).abs() < 1e-9 {
            return Err(Error::AmbiguousClassification {
                reason: "iteration from 0 does not separate the boundary fixed points".into(),
                gaps: vec![(d0 - d1).abs()],
            });
        }
        Ok(if d0 < d1 { 0 } else { 1 })
    }

    /// Conjugator chi with `chi o phi o chi^{-1}` canonical: chi maps the
    /// Denjoy-Wolff point to e1 and the repelling point to -e1, built as
    /// unitary -> Cayley -> Heisenberg translation -> Cayley back. Returns
    /// (chi, s, U) with `canonical_hyperbolic(s, U)` the conjugated map.
    pub fn hyperbolic_normal_form(&self) -> Result<(Automorphism, f64, CMatrix)> {
        let report = self.classify()?;
        if report.kind != AutomorphismKind::Hyperbolic {
            return Err(Error::NotHyperbolic { got: report.kind.to_string() });
        }
        let a = report.denjoy_wolff.as_ref().expect("hyperbolic has a Denjoy-Wolff point");
        let b = &report.boundary_fixed[1];
        let n = self.n;
        let v = unitary_sending_to_e1(a)?;
        let chi = {
            let mut b1 = v.apply(b)?;
            // keep the repelling point exactly on the sphere before mapping out
            let nb = b1.norm();
            for coord in b1.coords.iter_mut() {
                *coord /= Complex64::new(nb, 0.0);
            }
            // Siegel image of b1; finite because b1 != e1
            let c = cayley_matrix(n);
            let c_inv = cayley_inverse_matrix(n);
            let w0 = apply_projective(&c, &b1);
            // Heisenberg translation a' = -w0', a1 = -w0[1] + 2i |w0'|^2,
            // which sends w0 to 0 (the image of -e1) and fixes infinity
            let mut trans = CMatrix::identity(n + 1, n + 1);
            let mut tail_sq = 0.0;
            for j in 1..n {
                trans[(j, n)] = -w0.coords[j];
                tail_sq += w0.coords[j].norm_sqr();
                trans[(0, j)] = Complex64::new(0.0, 2.0) * (-w0.coords[j]).conj();
            }
            trans[(0, n)] = -w0.coords[0] + Complex64::new(0.0, 2.0 * tail_sq);
            Automorphism::from_matrix(c_inv * trans * c)?.compose(&v)?
        };
        let hat = chi.compose(self)?.compose(&chi.inverse())?;
        // read s and U off the normalized canonical matrix
        let s = (hat.m[(0, n)] / hat.m[(n, n)]).re;
        if !(0.0 < s && s < 1.0) {
            return Err(Error::AmbiguousClassification {
                reason: format!("conjugated matrix is not canonical (s = {s})"),
                gaps: vec![],
            });
        }
        let u = hat.m.view((1, 1), (n - 1, n - 1)).into_owned();
        Ok((chi, s, u))
    }

    /// For a parabolic automorphism already fixing e1: the Heisenberg normal
    /// form of `Phi o phi o Phi^{-1}`, returning (U, a) with a on the Siegel
    /// boundary. Callers with a Denjoy-Wolff point elsewhere pre-conjugate by
    /// a unitary taking it to e1.
    pub fn parabolic_siegel_form(&self) -> Result<(CMatrix, SiegelPoint)> {
        let report = self.classify()?;
        if report.kind != AutomorphismKind::Parabolic {
            return Err(Error::NotParabolic { got: report.kind.to_string() });
        }
        let dw = report.denjoy_wolff.as_ref().expect("parabolic has a Denjoy-Wolff point");
        if dw.dist(&Point::e1(self.n)) > 1e-8 {
            return Err(Error::InvalidParameter(
                "parabolic normal form requires the fixed point at e1; conjugate by a unitary first"
                    .into(),
            ));
        }
        let n = self.n;
        let c = cayley_matrix(n);
        let c_inv = cayley_inverse_matrix(n);
        let mut s_hom = c * &self.m * c_inv;
        let pivot = s_hom[(n, n)];
        if pivot.norm() < 1e-14 {
            return Err(Error::NotParabolic { got: "degenerate Siegel conjugate".into() });
        }
        s_hom /= pivot;
        // bottom row must be (0,...,0,1) for an affine Siegel map
        for k in 0..n {
            if s_hom[(n, k)].norm() > 1e-8 {
                return Err(Error::NotParabolic {
                    got: format!("Siegel conjugate is not affine (residue {:.3e})", s_hom[(n, k)].norm()),
                });
            }
        }
        let u = s_hom.view((1, 1), (n - 1, n - 1)).into_owned();
        let mut coords = Vec::with_capacity(n);
        coords.push(s_hom[(0, n)]);
        for j in 0..n - 1 {
            coords.push(s_hom[(1 + j, n)]);
        }
        let a = SiegelPoint::new(coords);
        Ok((u, a))
    }

    /// For a parabolic automorphism fixing e1: a start point z0 = -r0 e1 whose
    /// forward orbit is delta-separated in the pseudo-hyperbolic metric,
    /// checked exhaustively for iterate gaps 1..=k_max (which covers all index
    /// pairs by metric invariance).
    pub fn separated_iteration_start(&self, delta: f64, k_max: usize) -> Result<Point> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!("delta must lie in [0,1), got {delta}")));
        }
        let report = self.classify()?;
        if report.kind != AutomorphismKind::Parabolic {
            return Err(Error::NotParabolic { got: report.kind.to_string() });
        }
        let mut best = -1.0f64;
        // coarse-to-fine radius grid approaching the boundary
        let mut candidates = vec![0.0f64];
        let mut t = 1.0f64;
        while t <= 11.0 {
            candidates.push(1.0 - 10f64.powf(-t));
            t += 0.5;
        }
        for r in candidates {
            let z0 = Point::scaled_e1(self.n, -r);
            let orbit = OrbitLogs::forward(self, &z0, k_max)?;
            let mut min_sep = f64::INFINITY;
            for gap in 1..=k_max {
                min_sep = min_sep.min(orbit.distance_from_start(gap));
            }
            if min_sep > delta {
                return Ok(z0);
            }
            best = best.max(min_sep);
        }
        Err(Error::SeparationSearchFailed { best, requested: delta })
    }
}

/// Extract z = v[0..n]/v[n] from a homogeneous eigenvector when the last
/// coordinate is significant.
fn projective_point(v: &CVector, n: usize) -> Option<Point> {
    let last = v[n];
    if last.norm() < 1e-9 * v.norm() {
        return None;
    }
    Some(Point::new((0..n).map(|i| v[i] / last).collect()))
}

/// Apply a projective matrix to a point (used for Cayley-space bookkeeping
/// where the target is a Siegel point).
fn apply_projective(m: &CMatrix, z: &Point) -> SiegelPoint {
    let n = z.dim();
    let mut denom = m[(n, n)];
    for k in 0..n {
        denom += m[(n, k)] * z.coords[k];
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut num = m[(i, n)];
        for k in 0..n {
            num += m[(i, k)] * z.coords[k];
        }
        out.push(num / denom);
    }
    SiegelPoint::new(out)
}

/// Projective matrix of the Cayley transform `Phi(z) = i(e1+z)/(1-z[1])`.
pub fn cayley_matrix(n: usize) -> CMatrix {
    let i = Complex64::I;
    let mut c = CMatrix::zeros(n + 1, n + 1);
    c[(0, 0)] = i;
    c[(0, n)] = i;
    for j in 1..n {
        c[(j, j)] = i;
    }
    c[(n, 0)] = -Complex64::ONE;
    c[(n, n)] = Complex64::ONE;
    c
}

/// Projective matrix of the inverse Cayley transform.
pub fn cayley_inverse_matrix(n: usize) -> CMatrix {
    let i = Complex64::I;
    let mut c = CMatrix::zeros(n + 1, n + 1);
    c[(0, 0)] = Complex64::ONE;
    c[(0, n)] = -i;
    for j in 1..n {
        c[(j, j)] = Complex64::new(2.0, 0.0);
    }
    c[(n, 0)] = Complex64::ONE;
    c[(n, n)] = i;
    c
}

/// A unitary automorphism sending the boundary point `a` to e1.
pub fn unitary_sending_to_e1(a: &Point) -> Result<Automorphism> {
    let n = a.dim();
    let norm = a.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "expected a boundary point, got |a| = {norm}"
        )));
    }
    // columns: a normalized, then Gram-Schmidt completion of the standard basis
    let mut cols: Vec<CVector> = vec![CVector::from_iterator(
        n,
        a.coords.iter().map(|c| c / Complex64::new(norm, 0.0)),
    )];
    for j in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = CVector::zeros(n);
        v[j] = Complex64::ONE;
        for q in &cols {
            let proj = q.dotc(&v);
            v -= q * proj;
        }
        let nv = v.norm();
        if nv > 1e-8 {
            v /= Complex64::new(nv, 0.0);
            cols.push(v);
        }
    }
    if cols.len() != n {
        return Err(Error::InvalidParameter("failed to complete an orthonormal basis".into()));
    }
    let q = CMatrix::from_columns(&cols);
    // Q^H maps a to e1
    Automorphism::unitary(q.adjoint())
}

/// Forward orbit of a point together with log(1 - |z_k|^2), tracked through
/// the exact ball identity
///
/// ```text
/// 1 - |phi(z)|^2 = (1-|z|^2)(1-|a|^2)/|1-<z,a>|^2,   a = phi^{-1}(0),
/// ```
///
/// which stays accurate long after 1 - |z_k|^2 underflows in coordinates.
pub struct OrbitLogs {
    pub points: Vec<Point>,
    pub log_one_minus_sq: Vec<f64>,
}

impl OrbitLogs {
    pub fn forward(phi: &Automorphism, z0: &Point, steps: usize) -> Result<Self> {
        let a = phi.inverse().apply(&Point::zero(phi.dim()))?;
        let log_factor = (1.0 - a.norm_sq()).ln();
        let mut points = Vec::with_capacity(steps + 1);
        let mut logs = Vec::with_capacity(steps + 1);
        let mut z = z0.clone();
        let nsq = z.norm_sq();
        if nsq >= 1.0 {
            return Err(Error::PointNotInBall { norm: nsq.sqrt() });
        }
        let mut l = (1.0 - nsq).ln();
        points.push(z.clone());
        logs.push(l);
        for _ in 0..steps {
            let ip = inner(&z, &a)?;
            l += log_factor - 2.0 * (Complex64::ONE - ip).norm().ln();
            z = phi.apply(&z)?;
            points.push(z.clone());
            logs.push(l);
        }
        Ok(OrbitLogs { points, log_one_minus_sq: logs })
    }

    /// Pseudo-hyperbolic distance d(z_0, z_gap), computed from tracked logs.
    pub fn distance_from_start(&self, gap: usize) -> f64 {
        let z0 = &self.points[0];
        let zg = &self.points[gap];
        let ip = inner(z0, zg).expect("same dimension");
        let log_q = self.log_one_minus_sq[0] + self.log_one_minus_sq[gap]
            - 2.0 * (Complex64::ONE - ip).norm().ln();
        (1.0 - log_q.exp().clamp(0.0, 1.0)).sqrt()
    }
}
