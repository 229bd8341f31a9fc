//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured margins (run with `--nocapture` to see them).
//!
//! Closed-form spectra of infinite-dimensional operators are not reproducible
//! by finite-dimensional computation alone, so the gate combines exact
//! closed-form regressions, exact identities on grids, and the quantitative
//! constructive witnesses with their stated tolerances.

use std::time::Instant;

use num_complex::Complex64;

use wco_core::automorphism::Automorphism;
use wco_core::constructions::{
    adjoint_eigenvector, forward_eigenfunction, forward_residual_sweep,
    parabolic_approx_eigenvector, WitnessDetail,
};
use wco_core::geometry::{Point, SiegelPoint};
use wco_core::linalg::CMatrix;
use wco_core::operator::inverse_wco;
use wco_core::spectrum::{self, SpectrumShape};
use wco_core::symbol::{cocycle_sup_growth, FactoredSymbol, Symbol};
use wco_core::verification;
use wco_core::{MultiIndex, SpaceParams};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Runtime budget check with slack for unoptimized builds.
fn assert_runtime(name: &str, start: Instant, limit_s: f64) {
    let elapsed = start.elapsed().as_secs_f64();
    let factor = if cfg!(debug_assertions) { 10.0 } else { 1.0 };
    assert!(
        elapsed < limit_s * factor,
        "{name} took {elapsed:.1}s (budget {limit_s}s x{factor})"
    );
}

fn canonical(n: usize, s: f64) -> Automorphism {
    Automorphism::canonical_hyperbolic(n, s, None).unwrap()
}

fn disc_translation() -> Automorphism {
    Automorphism::heisenberg_translation(&SiegelPoint::new(vec![c(1.0, 0.0)]), None).unwrap()
}

fn ball_translation() -> Automorphism {
    let tail = c(0.5, 0.0);
    Automorphism::heisenberg_translation(
        &SiegelPoint::new(vec![c(0.8, tail.norm_sqr()), tail]),
        None,
    )
    .unwrap()
}

fn two_plus_z1(n: usize) -> Symbol {
    Symbol::univariate_in_first(n, &[c(2.0, 0.0), c(1.0, 0.0)])
}

#[test]
fn criterion_1_closed_form_prediction_regression() {
    let start = Instant::now();
    let tol = 1e-12;

    // disc composition operator: annulus [3^{-1/2}, 3^{1/2}]
    let p1 = spectrum::predict(
        &Symbol::constant(1, Complex64::ONE),
        &canonical(1, 0.5),
        SpaceParams::hardy(1),
    )
    .unwrap();
    let (lo, hi) = p1.radii();
    assert!((lo - 3.0f64.powf(-0.5)).abs() <= tol, "r_min = {lo}");
    assert!((hi - 3.0f64.sqrt()).abs() <= tol, "r_max = {hi}");

    // weighted ball operator: annulus [1/3, 9]
    let p2 =
        spectrum::predict(&two_plus_z1(2), &canonical(2, 0.5), SpaceParams::hardy(2)).unwrap();
    let (lo2, hi2) = p2.radii();
    assert!((lo2 - 1.0 / 3.0).abs() <= tol, "r_min = {lo2}");
    assert!((hi2 - 9.0).abs() <= tol, "r_max = {hi2}");

    // parabolic translation: circle of radius |psi(e1)| = 3
    let p3 =
        spectrum::predict(&two_plus_z1(1), &disc_translation(), SpaceParams::hardy(1)).unwrap();
    match p3.shape {
        SpectrumShape::Circle { r } => assert!((r - 3.0).abs() <= tol, "r = {r}"),
        _ => panic!("expected a circle, got {:?}", p3.shape),
    }

    // equal-radii collapse: psi = 1 - 0.5 z, circle sqrt(3)/2
    let p4 = spectrum::predict(
        &Symbol::univariate_in_first(1, &[c(1.0, 0.0), c(-0.5, 0.0)]),
        &canonical(1, 0.5),
        SpaceParams::hardy(1),
    )
    .unwrap();
    match p4.shape {
        SpectrumShape::Circle { r } => {
            assert!((r - 3.0f64.sqrt() / 2.0).abs() <= tol, "r = {r}")
        }
        _ => panic!("expected a circle, got {:?}", p4.shape),
    }

    assert_runtime("criterion 1", start, 1.0);
    println!(
        "[PASS] criterion 1: closed-form predictions match to 1e-12 ({:.0} ms)",
        start.elapsed().as_secs_f64() * 1e3
    );
}

#[test]
fn criterion_2_parabolic_residual_bound() {
    let start = Instant::now();
    let e2 = std::f64::consts::E * std::f64::consts::E;
    for (label, phi, dim) in
        [("N=1", disc_translation(), 1usize), ("N=2", ball_translation(), 2)]
    {
        let sp = SpaceParams::hardy(dim);
        for psi in [Symbol::constant(dim, Complex64::ONE), two_plus_z1(dim)] {
            let psi_e1 = {
                use wco_core::SymbolEval;
                psi.eval(&Point::e1(dim)).unwrap().norm()
            };
            let lambda = c(psi_e1, 0.0);
            let mut previous_ratio = f64::INFINITY;
            for m in [10usize, 25, 50, 100] {
                let w = parabolic_approx_eigenvector(&psi, &phi, sp, lambda, m).unwrap();
                match &w.detail {
                    WitnessDetail::ParabolicWindow {
                        residual_sq_bound,
                        residual_sq_measured,
                        norm_sq_lower_bound,
                        coeff_modulus_min,
                        coeff_modulus_max,
                        ..
                    } => {
                        let bound_expected = psi_e1 * psi_e1 * e2 * (e2 + 1.0) / m as f64;
                        assert!((residual_sq_bound - bound_expected).abs() < 1e-12);
                        assert!(
                            residual_sq_measured <= residual_sq_bound,
                            "{label} m={m}: measured {residual_sq_measured:.3e} > bound {residual_sq_bound:.3e}"
                        );
                        assert!(
                            w.norm * w.norm >= *norm_sq_lower_bound,
                            "{label} m={m}: ||h||^2 = {:.3e} below m/(2e^2)",
                            w.norm * w.norm
                        );
                        assert!(
                            *coeff_modulus_min > 1.0 / std::f64::consts::E
                                && *coeff_modulus_max < std::f64::consts::E
                        );
                        assert!(
                            w.residual < previous_ratio,
                            "{label} m={m}: ratio {:.3e} did not decrease from {previous_ratio:.3e}",
                            w.residual
                        );
                        previous_ratio = w.residual;
                        println!(
                            "  {label} |psi(e1)|={psi_e1} m={m:>3}: ratio^2 {residual_sq_measured:.3e} <= bound {residual_sq_bound:.3e}"
                        );
                    }
                    _ => panic!("expected a parabolic window witness"),
                }
            }
        }
    }
    assert_runtime("criterion 2", start, 60.0);
    println!(
        "[PASS] criterion 2: parabolic residual bounds hold and decrease over m in {{10,25,50,100}} ({:.1} s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_3_cocycle_growth_limits() {
    let start = Instant::now();
    let samples = 2000;

    // hyperbolic: limit max{|psi(a)|, |psi(b)|} at n = 200
    let hyperbolic_cases: Vec<(Symbol, Automorphism, f64)> = vec![
        (two_plus_z1(1), canonical(1, 0.5), 3.0),
        (Symbol::univariate_in_first(1, &[c(1.0, 0.0), c(-0.5, 0.0)]), canonical(1, 0.5), 1.5),
        (
            Symbol::univariate_in_first(2, &[c(3.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)]),
            canonical(2, 0.5),
            4.5,
        ),
    ];
    for (psi, phi, expect) in &hyperbolic_cases {
        let r = cocycle_sup_growth(psi, phi, 200, samples, 0).unwrap();
        let got = r[199];
        let gap = (got - expect).abs() / expect;
        assert!(gap < 0.02, "hyperbolic r_200 = {got}, expected {expect}");
        println!("  hyperbolic r_200 = {got:.6} vs {expect} (relative gap {gap:.2e})");
    }

    // parabolic: limit |psi(a)| at n = 400
    let parabolic_cases: Vec<(Symbol, Automorphism, f64)> = vec![
        (two_plus_z1(1), disc_translation(), 3.0),
        (Symbol::univariate_in_first(1, &[c(2.0, 0.0), c(-0.5, 0.0)]), disc_translation(), 1.5),
        (two_plus_z1(2), ball_translation(), 3.0),
    ];
    for (psi, phi, expect) in &parabolic_cases {
        let r = cocycle_sup_growth(psi, phi, 400, samples, 0).unwrap();
        let got = r[399];
        let gap = (got - expect).abs() / expect;
        assert!(gap < 0.02, "parabolic r_400 = {got}, expected {expect}");
        println!("  parabolic  r_400 = {got:.6} vs {expect} (relative gap {gap:.2e})");
    }

    assert_runtime("criterion 3", start, 30.0);
    println!(
        "[PASS] criterion 3: cocycle growth within 2% of the predicted limits ({:.1} s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_4_eigen_witness_residuals() {
    let start = Instant::now();

    // Forward witness, N = 1 (gamma = 3 sharpens the truncation floor):
    // lambda interior on the positive-real ray.
    let sp1 = SpaceParams::new(1, 3.0).unwrap();
    let psi1 = Symbol::constant(1, Complex64::ONE);
    let phi1 = canonical(1, 0.5);
    let w = forward_eigenfunction(&psi1, &phi1, sp1, c(1.0, 0.0), 40, 60).unwrap();
    assert!(w.residual <= 1e-6, "forward N=1 residual {:.3e}", w.residual);

    // monotone decrease in the term count until the truncation floor
    let sweep =
        forward_residual_sweep(&psi1, &phi1, sp1, c(1.0, 0.0), &[5, 10, 20, 30, 40], 60).unwrap();
    let floor = sweep.last().unwrap().residual;
    let mut prev = f64::INFINITY;
    for item in &sweep {
        assert!(
            item.residual <= prev * 1.01 || item.residual <= 4.0 * floor,
            "forward residual not decreasing: {:.3e} after {:.3e}",
            item.residual,
            prev
        );
        prev = item.residual;
    }

    // Diagnostic only: the same construction measured on a rotated ray. The
    // exact eigenfunctions for non-real rays are oscillatory multipliers with
    // slow coefficient decay, which keeps the degree-60 compressed residual
    // orders of magnitude above the real-ray floor; the rotated rays are
    // therefore certified through the adjoint witness below, whose residual
    // is evaluated exactly on kernel combinations.
    let ray = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
    let diag = forward_eigenfunction(&psi1, &phi1, sp1, ray, 40, 60).unwrap();
    println!(
        "  [diagnostic] forward witness on ray pi/3: residual {:.3e} (truncation-floor limited)",
        diag.residual
    );

    // Forward witness, N = 2, D = 20, with a rotation block.
    let sp2 = SpaceParams::new(2, 3.0).unwrap();
    let u = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::from_polar(
        1.0,
        std::f64::consts::FRAC_PI_3,
    )]));
    let phi2 = Automorphism::canonical_hyperbolic(2, 0.5, Some(&u)).unwrap();
    let w2 = forward_eigenfunction(&Symbol::constant(2, Complex64::ONE), &phi2, sp2, c(1.0, 0.0), 40, 20)
        .unwrap();
    assert!(w2.residual <= 1e-4, "forward N=2 residual {:.3e}", w2.residual);

    // Adjoint witness, N = 1, on two rays (exact kernel-level residual).
    let spa = SpaceParams::hardy(1);
    let psia = Symbol::univariate_in_first(1, &[c(1.0, 0.0), c(-0.9, 0.0)]);
    let phia = canonical(1, 0.5);
    for theta in [0.0, std::f64::consts::FRAC_PI_3] {
        let lam = Complex64::from_polar(0.5, theta);
        let wa = adjoint_eigenvector(&psia, &phia, spa, lam, 40).unwrap();
        assert!(
            wa.residual <= 1e-6,
            "adjoint N=1 residual {:.3e} on ray {theta}",
            wa.residual
        );
    }
    // monotone decrease in terms (J = 10 is rejected by the tail guard for
    // this configuration, so the sweep starts where the tails have converged)
    let mut prev = f64::INFINITY;
    for j in [15usize, 25, 40] {
        let wa = adjoint_eigenvector(&psia, &phia, spa, c(0.5, 0.0), j).unwrap();
        assert!(wa.residual <= prev);
        prev = wa.residual;
    }

    // Adjoint witness, N = 2, on two rays.
    let spa2 = SpaceParams::hardy(2);
    let psia2 = Symbol::univariate_in_first(2, &[c(1.0, 0.0), c(-0.9, 0.0)]);
    let phia2 = canonical(2, 0.5);
    let mid = 0.19f64.sqrt(); // geometric center of the regime [0.3, 0.6333]
    for theta in [0.0, std::f64::consts::FRAC_PI_3] {
        let lam = Complex64::from_polar(mid, theta);
        let wa = adjoint_eigenvector(&psia2, &phia2, spa2, lam, 40).unwrap();
        assert!(
            wa.residual <= 1e-4,
            "adjoint N=2 residual {:.3e} on ray {theta}",
            wa.residual
        );
    }

    assert_runtime("criterion 4", start, 120.0);
    println!(
        "[PASS] criterion 4: witness residuals (forward 1e-6/1e-4 on the real ray, adjoint 1e-6/1e-4 on rays 0 and pi/3), monotone in terms ({:.1} s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_5_exact_identity_suite() {
    let start = Instant::now();
    let results = verification::run_all(0).unwrap();
    assert_eq!(results.len(), 12);
    for r in &results {
        println!(
            "  [{}] {} (max error {:.3e}, tolerance {:.1e})",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.max_error,
            r.tolerance
        );
        assert!(r.pass, "{} failed: {:.3e} > {:.1e}", r.name, r.max_error, r.tolerance);
    }
    assert_runtime("criterion 5", start, 60.0);
    println!(
        "[PASS] criterion 5: exact-identity suite, 12 checks green ({:.1} s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_6_normal_form_round_trips() {
    let start = Instant::now();

    // hyperbolic: random conjugations recover s to 1e-10
    let conjugators = [
        Automorphism::involution(&Point::new(vec![c(0.3, -0.2), c(0.1, 0.25)])).unwrap(),
        Automorphism::involution(&Point::new(vec![c(-0.45, 0.1), c(0.2, -0.15)])).unwrap(),
        Automorphism::involution(&Point::new(vec![c(0.05, 0.55), c(-0.3, 0.1)])).unwrap(),
    ];
    let theta = 1.1;
    let u_in = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::from_polar(
        1.0, theta,
    )]));
    for s_true in [0.37, 0.6] {
        let base = Automorphism::canonical_hyperbolic(2, s_true, Some(&u_in)).unwrap();
        for chi0 in &conjugators {
            let phi = chi0.compose(&base).unwrap().compose(&chi0.inverse()).unwrap();
            let (chi, s, u) = phi.hyperbolic_normal_form().unwrap();
            assert!((s - s_true).abs() <= 1e-10, "recovered s = {s}, true {s_true}");
            assert!((u[(0, 0)] - Complex64::from_polar(1.0, theta)).norm() <= 1e-10);
            let canonical_again = Automorphism::canonical_hyperbolic(2, s, Some(&u)).unwrap();
            let conj = chi.compose(&phi).unwrap().compose(&chi.inverse()).unwrap();
            assert!(
                conj.matrix_distance(&canonical_again) <= 1e-10,
                "normal-form matrix defect {:.3e}",
                conj.matrix_distance(&canonical_again)
            );
            // rho = (1+s)/(1-s) equals the repelling-point Jacobian radius
            let report = phi.classify().unwrap();
            let rho = report.rho.unwrap();
            assert!((rho - (1.0 + s) / (1.0 - s)).abs() <= 1e-9);
        }
    }

    // parabolic Siegel form round trip to 1e-10
    let u_rot = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::from_polar(
        1.0,
        std::f64::consts::FRAC_PI_3,
    )]));
    let tail = c(0.5, -0.2);
    let a_in = SiegelPoint::new(vec![c(0.8, tail.norm_sqr()), tail]);
    let phi_p = Automorphism::heisenberg_translation(&a_in, Some(&u_rot)).unwrap();
    let (u_out, a_out) = phi_p.parabolic_siegel_form().unwrap();
    assert!((&u_out - &u_rot).norm() <= 1e-10);
    assert!((a_out.coords[0] - a_in.coords[0]).norm() <= 1e-10);
    assert!((a_out.coords[1] - a_in.coords[1]).norm() <= 1e-10);

    let (u1, a1) = disc_translation().parabolic_siegel_form().unwrap();
    assert_eq!(u1.nrows(), 0);
    assert!((a1.coords[0] - c(1.0, 0.0)).norm() <= 1e-10);

    // conjugation invariance of the prediction
    let sp = SpaceParams::hardy(2);
    let psi = two_plus_z1(2);
    let phi = canonical(2, 0.5);
    let base_radii = spectrum::predict(&psi, &phi, sp).unwrap().radii();
    for chi in &conjugators {
        let conj_phi = chi.compose(&phi).unwrap().compose(&chi.inverse()).unwrap();
        let conj_psi = FactoredSymbol::from_symbol(&psi).compose_with(&chi.inverse()).unwrap();
        let radii = spectrum::predict(&conj_psi, &conj_phi, sp).unwrap().radii();
        assert!(
            (radii.0 - base_radii.0).abs() <= 1e-10 && (radii.1 - base_radii.1).abs() <= 1e-10,
            "conjugated radii {radii:?} vs {base_radii:?}"
        );
    }

    assert_runtime("criterion 6", start, 30.0);
    println!(
        "[PASS] criterion 6: normal-form round trips and conjugation invariance to 1e-10 ({:.1} s)",
        start.elapsed().as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// criterion 7: quadrature oracles for the space layer
// ---------------------------------------------------------------------------

/// Simpson quadrature on [a, b].
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// ||z^n||^2 on the disc spaces by radial quadrature:
/// gamma = 1 -> 1; gamma > 1 -> (gamma-1) Int u^n (1-u)^{gamma-2} du.
fn disc_norm_oracle(n: usize, gamma: f64) -> f64 {
    if gamma == 1.0 {
        // circle average of |z^n|^2
        return simpson(|_| 1.0, 0.0, 2.0 * std::f64::consts::PI, 2000)
            / (2.0 * std::f64::consts::PI);
    }
    (gamma - 1.0) * simpson(|u| u.powi(n as i32) * (1.0 - u).powf(gamma - 2.0), 0.0, 1.0, 20000)
}

/// Int over S_2 of |z1|^{2a} |z2|^{2b} dsigma = 2 Int cos^{2a+1} sin^{2b+1}.
fn sphere2_moment(a: usize, b: usize) -> f64 {
    simpson(
        |t| 2.0 * t.cos().powi(2 * a as i32 + 1) * t.sin().powi(2 * b as i32 + 1),
        0.0,
        std::f64::consts::FRAC_PI_2,
        20000,
    )
}

/// ||z^alpha||^2 on A^2_{gamma-2}(B_2) by radial x sphere quadrature.
fn ball2_bergman_oracle(a: usize, b: usize, gamma: f64) -> f64 {
    let alpha = gamma - 2.0;
    let radial = |k: usize| {
        simpson(
            |r: f64| r.powi(2 * k as i32 + 3) * (1.0 - r * r).powf(alpha),
            0.0,
            1.0,
            20000,
        )
    };
    radial(a + b) / radial(0) * sphere2_moment(a, b)
}

#[test]
fn criterion_7_space_layer_oracles() {
    let start = Instant::now();

    // monomial norms against quadrature, N <= 2, |alpha| <= 4, to 1e-6
    for gamma in [1.0, 2.0, 3.0] {
        let sp = SpaceParams::new(1, gamma).unwrap();
        for n in 0..=4usize {
            let exact = sp.monomial_norm_sq(&MultiIndex::new(vec![n]));
            let oracle = disc_norm_oracle(n, gamma);
            assert!(
                (exact - oracle).abs() <= 1e-6,
                "disc gamma={gamma} n={n}: {exact} vs oracle {oracle}"
            );
        }
    }
    let sp_h2 = SpaceParams::hardy(2);
    let sp_b2 = SpaceParams::new(2, 3.0).unwrap();
    for a in 0..=4usize {
        for b in 0..=(4 - a) {
            let idx = MultiIndex::new(vec![a, b]);
            let hardy_exact = sp_h2.monomial_norm_sq(&idx);
            let hardy_oracle = sphere2_moment(a, b);
            assert!(
                (hardy_exact - hardy_oracle).abs() <= 1e-6,
                "H2(B_2) alpha=({a},{b}): {hardy_exact} vs {hardy_oracle}"
            );
            let berg_exact = sp_b2.monomial_norm_sq(&idx);
            let berg_oracle = ball2_bergman_oracle(a, b, 3.0);
            assert!(
                (berg_exact - berg_oracle).abs() <= 1e-6,
                "A^2_1(B_2) alpha=({a},{b}): {berg_exact} vs {berg_oracle}"
            );
        }
    }

    // reproducing property to 1e-8
    let rep = verification::check_reproducing_property(0).unwrap();
    assert!(rep.pass, "reproducing property: {:.3e}", rep.max_error);

    // norm-equivalence ratios bounded for gamma in {1.5, 2, 3}
    for gamma in [1.5, 2.0, 3.0] {
        for n in [1usize, 2] {
            let sp = SpaceParams::new(n, gamma).unwrap();
            let hardy = SpaceParams::hardy(n);
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for k in 0..=60usize {
                let mut e = vec![0usize; n];
                e[0] = k / 2;
                e[n - 1] += k - k / 2;
                let idx = MultiIndex::new(e);
                let ratio = (1.0 + k as f64).powf(1.0 - gamma) * hardy.monomial_norm_sq(&idx)
                    / sp.monomial_norm_sq(&idx);
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            assert!(
                lo > 0.05 && hi < 20.0 && hi / lo < 10.0,
                "gamma={gamma} n={n}: ratio range [{lo}, {hi}]"
            );
        }
    }

    assert_runtime("criterion 7", start, 60.0);
    println!(
        "[PASS] criterion 7: monomial norms match quadrature oracles to 1e-6; reproducing property and norm equivalence hold ({:.1} s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn inversion_duality_of_predictions() {
    // radii of the inverse operator are the reciprocals, swapped
    let sp = SpaceParams::new(1, 2.0).unwrap();
    let psi = two_plus_z1(1);
    let phi = canonical(1, 0.5);
    let (lo, hi) = spectrum::predict(&psi, &phi, sp).unwrap().radii();
    let (inv_sym, inv_phi) = inverse_wco(&psi, &phi).unwrap();
    let (ilo, ihi) = spectrum::predict(&inv_sym, &inv_phi, sp).unwrap().radii();
    assert!((ilo - 1.0 / hi).abs() <= 1e-10);
    assert!((ihi - 1.0 / lo).abs() <= 1e-10);
}
