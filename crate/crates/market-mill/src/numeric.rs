//! Internal quadrature helpers.

/// Composite Simpson rule on [a, b] with n subintervals (n even, >= 2).
pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 2 && n.is_multiple_of(2), "Simpson needs an even number of subintervals");
    assert!(a.is_finite() && b.is_finite() && b > a);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Integrates f over consecutive segments [edges[0], edges[1]], ... applying
/// Simpson per segment, so integrand kinks placed on edges cost no accuracy.
/// Zero-length segments are skipped.
pub(crate) fn integrate_segments<F: Fn(f64) -> f64>(
    f: F,
    edges: &[f64],
    n_per_segment: usize,
) -> f64 {
    assert!(edges.len() >= 2, "need at least one segment");
    let mut total = 0.0;
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        assert!(b >= a, "segment edges must be sorted");
        if b > a {
            total += simpson(&f, a, b, n_per_segment);
        }
    }
    total
}
