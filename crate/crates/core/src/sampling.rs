//! Deterministic low-discrepancy sampling of the unit sphere S_N in C^N and
//! of interior grids of the ball.
//!
//! Samples are reproducible functions of (dimension, count, seed). The sphere
//! sampler always appends the points +-e_j, so suprema and infima probed over
//! a sample set see the coordinate directions exactly.

use num_complex::Complex64;

use crate::geometry::Point;

const PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Radical-inverse (van der Corput) value of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let bf = b as f64;
    while i > 0 {
        f /= bf;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Halton point in (0,1)^dims at index `i` (index is 1-based to avoid 0).
fn halton(i: u64, dims: usize) -> Vec<f64> {
    (0..dims).map(|d| radical_inverse(i, PRIMES[d])).collect()
}

/// Standard Gaussian pair from two uniforms via Box-Muller.
fn box_muller(u1: f64, u2: f64) -> (f64, f64) {
    let r = (-2.0 * u1.max(1e-300).ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * u2;
    (r * t.cos(), r * t.sin())
}

/// `count` low-discrepancy points on the sphere S_N (|z| = 1), plus the 2N
/// coordinate points +-e_j.
pub fn sphere_samples(n: usize, count: usize, seed: u64) -> Vec<Point> {
    let mut out = Vec::with_capacity(count + 2 * n);
    if n == 1 {
        // uniform circle grid, rotated by a seed-dependent golden offset
        let offset = if seed == 0 { 0.0 } else { (seed as f64 * 0.618_033_988_749_895).fract() };
        for j in 0..count {
            let theta = 2.0 * std::f64::consts::PI * ((j as f64 + offset) / count as f64);
            out.push(Point::new(vec![Complex64::from_polar(1.0, theta)]));
        }
    } else {
        let skip = 1 + seed.wrapping_mul(7919) % 1_000_003;
        let mut idx = skip;
        while out.len() < count {
            let u = halton(idx, 2 * n);
            idx += 1;
            let mut coords = Vec::with_capacity(n);
            let mut norm_sq = 0.0;
            for j in 0..n {
                let (g1, g2) = box_muller(u[2 * j], u[2 * j + 1]);
                norm_sq += g1 * g1 + g2 * g2;
                coords.push(Complex64::new(g1, g2));
            }
            let norm = norm_sq.sqrt();
            if norm < 1e-8 {
                continue;
            }
            for c in coords.iter_mut() {
                *c /= Complex64::new(norm, 0.0);
            }
            out.push(Point::new(coords));
        }
    }
    for j in 0..n {
        let mut plus = vec![Complex64::ZERO; n];
        plus[j] = Complex64::ONE;
        out.push(Point::new(plus.clone()));
        plus[j] = -Complex64::ONE;
        out.push(Point::new(plus));
    }
    out
}

/// `count` deterministic interior points with |z| <= r_max.
pub fn ball_samples(n: usize, count: usize, r_max: f64, seed: u64) -> Vec<Point> {
    let skip = 1 + seed.wrapping_mul(104_729) % 1_000_003;
    let mut out = Vec::with_capacity(count);
    let mut idx = skip;
    while out.len() < count {
        let u = halton(idx, 2 * n + 1);
        idx += 1;
        let mut coords = Vec::with_capacity(n);
        let mut norm_sq = 0.0;
        for j in 0..n {
            let (g1, g2) = box_muller(u[2 * j], u[2 * j + 1]);
            norm_sq += g1 * g1 + g2 * g2;
            coords.push(Complex64::new(g1, g2));
        }
        let norm = norm_sq.sqrt();
        if norm < 1e-8 {
            continue;
        }
        // radius from the last Halton coordinate, uniform in volume
        let r = r_max * u[2 * n].powf(1.0 / (2.0 * n as f64));
        for c in coords.iter_mut() {
            *c *= Complex64::new(r / norm, 0.0);
        }
        out.push(Point::new(coords));
    }
    out
}
