//! Machine-checkable suite of the exact identities the library relies on.
//!
//! Each check runs on deterministic interior grids (>= 100 points where a
//! grid applies) and reports its worst error against a fixed tolerance. The
//! CLI `verify` command serializes the results; the acceptance tests assert
//! them.

use num_complex::Complex64;
use serde::Serialize;

use crate::automorphism::Automorphism;
use crate::constructions::{CircularIntertwiner, KernelOrbit};
use crate::error::Result;
use crate::geometry::{inner, pseudo_hyperbolic_distance, Point, SiegelPoint};
use crate::operator::{adjoint_on_kernel, TruncatedOperator};
use crate::sampling::ball_samples;
use crate::series::{kernel_series, TruncatedSeries};
use crate::space::SpaceParams;
use crate::symbol::{cocycle, cocycle_eval, Symbol, SymbolEval};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: &str, max_error: f64, tolerance: f64) -> Self {
        CheckResult { name: name.into(), max_error, tolerance, pass: max_error <= tolerance }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn test_automorphisms() -> Vec<Automorphism> {
    let invol =
        Automorphism::involution(&Point::new(vec![c(0.3, -0.2), c(0.15, 0.25)])).unwrap();
    let hyp = Automorphism::canonical_hyperbolic(2, 0.5, None).unwrap();
    let tail = c(0.4, 0.1);
    let par = Automorphism::heisenberg_translation(
        &SiegelPoint::new(vec![c(0.7, tail.norm_sqr()), tail]),
        None,
    )
    .unwrap();
    let mixed = invol.compose(&hyp).unwrap();
    vec![invol, hyp, par, mixed]
}

/// Ball identity: (1-|phi z|^2) |1-<z,a>|^2 = (1-|z|^2)(1-|a|^2), a = phi^{-1}(0).
pub fn check_ball_identity(seed: u64) -> Result<CheckResult> {
    let grid = ball_samples(2, 120, 0.85, seed);
    let mut worst = 0.0f64;
    for phi in test_automorphisms() {
        let a = phi.inverse().apply(&Point::zero(2))?;
        for z in &grid {
            let img = phi.apply(z)?;
            let lhs = (1.0 - img.norm_sq()) * (Complex64::ONE - inner(z, &a)?).norm_sqr();
            let rhs = (1.0 - z.norm_sq()) * (1.0 - a.norm_sq());
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(CheckResult::new("ball_identity", worst, 1e-12))
}

/// Pseudo-hyperbolic metric invariance d(phi z, phi w) = d(z, w).
pub fn check_metric_invariance(seed: u64) -> Result<CheckResult> {
    let grid = ball_samples(2, 40, 0.8, seed);
    let mut worst = 0.0f64;
    for phi in test_automorphisms() {
        for z in &grid {
            for w in grid.iter().step_by(4) {
                let d0 = pseudo_hyperbolic_distance(z, w)?;
                let d1 = pseudo_hyperbolic_distance(&phi.apply(z)?, &phi.apply(w)?)?;
                worst = worst.max((d0 - d1).abs());
            }
        }
    }
    Ok(CheckResult::new("metric_invariance", worst, 1e-12))
}

/// Wolff-type identity for parabolic maps fixing e1:
/// |1-phi1(z)|^2/(1-|phi z|^2) = |1-z1|^2/(1-|z|^2).
pub fn check_wolff_identity(seed: u64) -> Result<CheckResult> {
    let tail = c(-0.3, 0.2);
    let phi = Automorphism::heisenberg_translation(
        &SiegelPoint::new(vec![c(0.9, tail.norm_sqr()), tail]),
        None,
    )?;
    let grid = ball_samples(2, 120, 0.85, seed);
    let mut worst = 0.0f64;
    for z in &grid {
        let img = phi.apply(z)?;
        let lhs = (Complex64::ONE - img.coords[0]).norm_sqr() / (1.0 - img.norm_sq());
        let rhs = (Complex64::ONE - z.coords[0]).norm_sqr() / (1.0 - z.norm_sq());
        worst = worst.max((lhs - rhs).abs() / rhs.max(1.0));
    }
    Ok(CheckResult::new("wolff_identity", worst, 1e-10))
}

/// Canonical determinant identity det phi'(z) = (d phi1/d z1)^{(N+1)/2}.
pub fn check_determinant_identity(seed: u64) -> Result<CheckResult> {
    let phi = Automorphism::canonical_hyperbolic(2, 0.5, None)?;
    let grid = ball_samples(2, 120, 0.85, seed);
    let mut worst = 0.0f64;
    for z in &grid {
        let jac = phi.jacobian(z)?;
        let det = jac[(0, 0)] * jac[(1, 1)] - jac[(0, 1)] * jac[(1, 0)];
        let expect = jac[(0, 0)].powc(c(1.5, 0.0));
        worst = worst.max((det - expect).norm());
    }
    Ok(CheckResult::new("canonical_determinant_identity", worst, 1e-10))
}

/// Kernel overlap |<g_i, g_j>| = (1 - d(z_i, z_j)^2)^K along orbits.
pub fn check_kernel_overlap(_seed: u64) -> Result<CheckResult> {
    let phi = Automorphism::canonical_hyperbolic(2, 0.5, None)?;
    let orbit = KernelOrbit::two_sided(&phi, 6, 6)?;
    let mut worst = 0.0f64;
    for k_exp in [0.5f64, 1.0, 1.5] {
        for i in -6i64..=6 {
            for j in -6i64..=6 {
                let d = pseudo_hyperbolic_distance(orbit.point(i), orbit.point(j))?;
                let expect = (1.0 - d * d).powf(k_exp);
                worst = worst.max((orbit.overlap_modulus(i, j, k_exp) - expect).abs());
            }
        }
    }
    Ok(CheckResult::new("kernel_overlap_identity", worst, 1e-12))
}

/// Adjoint kernel relation <f, C^* K_z> = psi(z) f(phi(z)).
pub fn check_adjoint_kernel_relation(seed: u64) -> Result<CheckResult> {
    let sp = SpaceParams::hardy(2);
    let psi = Symbol::univariate_in_first(2, &[c(2.0, 0.0), c(1.0, 0.0)]);
    let phi = Automorphism::canonical_hyperbolic(2, 0.5, None)?;
    let degree = 40;
    let mut f = TruncatedSeries::zero(2, degree);
    f.coeffs_mut()[0] = c(0.4, -0.1);
    f.coeffs_mut()[2] = c(1.0, 0.3);
    f.coeffs_mut()[5] = c(-0.5, 0.2);
    let grid = ball_samples(2, 100, 0.5, seed);
    let mut worst = 0.0f64;
    for z in &grid {
        let adj = adjoint_on_kernel(&psi, &phi, sp, z, degree)?;
        let lhs = sp.inner_product(&f, &adj)?;
        let rhs = psi.eval(z)? * f.evaluate(&phi.apply(z)?)?;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(CheckResult::new("adjoint_kernel_relation", worst, 1e-10))
}

/// Product formula: C1 C2 = C with symbol psi1 (psi2 o phi1), map phi2 o phi1.
pub fn check_composition_law(seed: u64) -> Result<CheckResult> {
    let psi1 = Symbol::univariate_in_first(2, &[c(2.0, 0.0), c(1.0, 0.0)]);
    let psi2 = Symbol::univariate_in_first(2, &[c(1.0, 0.0), c(-0.5, 0.0)]);
    let phi1 = Automorphism::canonical_hyperbolic(2, 0.4, None)?;
    let phi2 = Automorphism::involution(&Point::new(vec![c(0.2, 0.1), c(-0.1, 0.3)]))?;
    let (sym, phi) = crate::operator::compose_wco(&psi1, &phi1, &psi2, &phi2)?;
    let grid = ball_samples(2, 120, 0.8, seed);
    let mut worst = 0.0f64;
    for z in &grid {
        let w1 = phi1.apply(z)?;
        let direct = psi1.eval(z)? * psi2.eval(&w1)?;
        worst = worst.max((sym.eval(z)? - direct).norm());
        worst = worst.max(phi.apply(z)?.dist(&phi2.apply(&w1)?));
    }
    Ok(CheckResult::new("composition_law", worst, 1e-10))
}

/// Inverse formula: C^{-1} has symbol 1/(psi o phi^{-1}) and map phi^{-1}.
pub fn check_inverse_law(seed: u64) -> Result<CheckResult> {
    let psi = Symbol::univariate_in_first(2, &[c(2.0, 0.0), c(1.0, 0.0)]);
    let phi = Automorphism::canonical_hyperbolic(2, 0.5, None)?;
    let (inv_sym, inv_phi) = crate::operator::inverse_wco(&psi, &phi)?;
    let grid = ball_samples(2, 120, 0.8, seed);
    let mut worst = 0.0f64;
    for z in &grid {
        let w = inv_phi.apply(z)?;
        let prod = inv_sym.eval(z)? * psi.eval(&w)?;
        worst = worst.max((prod - Complex64::ONE).norm());
        worst = worst.max(phi.apply(&w)?.dist(z));
    }
    Ok(CheckResult::new("inverse_law", worst, 1e-10))
}

/// Cocycle identity psi_(m+n)(z) = psi_(m)(z) psi_(n)(phi_m(z)), |m|,|n| <= 8.
pub fn check_cocycle_identity(seed: u64) -> Result<CheckResult> {
    let psi = Symbol::univariate_in_first(1, &[c(2.0, 0.0), c(1.0, 0.0)]);
    let phi = Automorphism::canonical_hyperbolic(1, 0.5, None)?;
    let grid = ball_samples(1, 12, 0.7, seed);
    let mut worst = 0.0f64;
    for m in -8i64..=8 {
        for n in -8i64..=8 {
            let phim = phi.iterate(m);
            for z in &grid {
                let lhs = cocycle_eval(&psi, &phi, m + n, z)?;
                let rhs = cocycle_eval(&psi, &phi, m, z)?
                    * cocycle_eval(&psi, &phi, n, &phim.apply(z)?)?;
                worst = worst.max((lhs - rhs).norm() / rhs.norm().max(1.0));
            }
        }
    }
    Ok(CheckResult::new("cocycle_identity", worst, 1e-10))
}

/// C^n = C_{psi_(n), phi_n} on low-degree columns of the truncation
/// (columns whose degree band, spread by rho per power, stays inside the
/// truncation window).
pub fn check_power_cocycle_matrix(_seed: u64) -> Result<CheckResult> {
    let sp = SpaceParams::hardy(1);
    let psi = Symbol::univariate_in_first(1, &[c(2.0, 0.0), c(1.0, 0.0)]);
    let phi = Automorphism::canonical_hyperbolic(1, 0.2, None)?;
    let degree = 30;
    let op = TruncatedOperator::build(&psi, &phi, sp, degree)?;
    let mut worst = 0.0f64;
    for (n, max_col) in [(2usize, 8usize), (3, 3), (4, 1)] {
        let mut power = op.matrix().clone();
        for _ in 1..n {
            power = op.matrix() * power;
        }
        let sym_series = cocycle(&psi, &phi, n as i64).to_series(degree)?;
        let direct = TruncatedOperator::build_from_symbol_series(
            &sym_series,
            &phi.iterate(n as i64),
            sp,
            degree,
        )?;
        for col in 0..=max_col {
            worst = worst.max((power.column(col) - direct.matrix().column(col)).norm());
        }
    }
    Ok(CheckResult::new("power_cocycle_matrix", worst, 1e-8))
}

/// Intertwiner relation F(phi(z)) = e^{i theta} F(z).
pub fn check_intertwiner(seed: u64) -> Result<CheckResult> {
    let phi = Automorphism::canonical_hyperbolic(2, 0.5, None)?;
    let grid = ball_samples(2, 120, 0.85, seed);
    let mut worst = 0.0f64;
    for theta in [0.7f64, std::f64::consts::PI, 2.4] {
        let f = CircularIntertwiner::new(&phi, theta)?;
        let rot = Complex64::from_polar(1.0, theta);
        for z in &grid {
            let lhs = f.eval(&phi.apply(z)?);
            let rhs = rot * f.eval(z);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(CheckResult::new("intertwiner_relation", worst, 1e-10))
}

/// Reproducing property <f, K_w> = f(w) in the truncated space.
pub fn check_reproducing_property(seed: u64) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for (n, gamma) in [(1usize, 1.0f64), (2, 1.0), (2, 3.0)] {
        let sp = SpaceParams::new(n, gamma)?;
        let degree = 45;
        let mut f = TruncatedSeries::zero(n, degree);
        f.coeffs_mut()[0] = c(0.3, 0.1);
        f.coeffs_mut()[1] = c(-0.7, 0.2);
        f.coeffs_mut()[2] = c(0.2, -0.4);
        if n > 1 {
            f.coeffs_mut()[4] = c(0.5, 0.0);
        }
        for w in ball_samples(n, 40, 0.6, seed) {
            let kw = kernel_series(&w, sp.two_k(), degree);
            let lhs = sp.inner_product(&f, &kw)?;
            let rhs = f.evaluate(&w)?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(CheckResult::new("reproducing_property", worst, 1e-8))
}

/// Run every check with one seed; the list mirrors the identity suite the
/// acceptance gate asserts.
pub fn run_all(seed: u64) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_ball_identity(seed)?,
        check_metric_invariance(seed)?,
        check_wolff_identity(seed)?,
        check_determinant_identity(seed)?,
        check_kernel_overlap(seed)?,
        check_adjoint_kernel_relation(seed)?,
        check_composition_law(seed)?,
        check_inverse_law(seed)?,
        check_cocycle_identity(seed)?,
        check_power_cocycle_matrix(seed)?,
        check_intertwiner(seed)?,
        check_reproducing_property(seed)?,
    ])
}
