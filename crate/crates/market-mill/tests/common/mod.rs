//! Shared helpers for integration tests. Quadrature and statistics here are
//! written independently of the library's internals on purpose: they are the
//! yardstick, not the thing being measured.

#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Composite Simpson rule, n even.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 2 && n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Composite midpoint rule; every node is interior, so integrands that are
/// only defined by one-sided limits at the endpoints are safe.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 1);
    let h = (b - a) / n as f64;
    (0..n).map(|k| f(a + (k as f64 + 0.5) * h)).sum::<f64>() * h
}

/// Kolmogorov-Smirnov statistic of samples against a reference CDF.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty());
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Asymptotic KS acceptance threshold at significance alpha.
pub fn ks_threshold(n: usize, alpha: f64) -> f64 {
    ((-(alpha / 2.0).ln()) / 2.0).sqrt() / (n as f64).sqrt()
}

/// Upper-tail p-value of a chi-square statistic.
pub fn chi_square_p(stat: f64, dof: f64) -> f64 {
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Sector 1..=8 via the polar angle, counterclockwise from the positive
/// x-axis in eighth-turns. Independent of the library's branch logic; only
/// meaningful off the sector boundaries.
pub fn octant_sector(x: f64, y: f64) -> u8 {
    let mut theta = y.atan2(x);
    if theta < 0.0 {
        theta += 2.0 * std::f64::consts::PI;
    }
    let k = (theta / (std::f64::consts::PI / 4.0)).floor() as i64;
    (k.clamp(0, 7) + 1) as u8
}

/// True when the point sits within eps of a sector boundary (either axis or
/// either diagonal), where octant_sector and boundary conventions disagree.
pub fn near_boundary(x: f64, y: f64, eps: f64) -> bool {
    x.abs() < eps || y.abs() < eps || (x.abs() - y.abs()).abs() < eps
}
