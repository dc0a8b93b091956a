use rand::Rng;

use crate::rng::unit_open;

/// Double-exponential (Laplace) distribution centered at zero,
/// density (1/2σ) exp(-|y|/σ). σ is the scale parameter; the standard
/// deviation is √2 σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceParams {
    sigma: f64,
}

impl LaplaceParams {
    /// σ must be positive and finite.
    pub fn new(sigma: f64) -> Self {
        assert!(
            sigma.is_finite() && sigma > 0.0,
            "Laplace scale must be positive and finite, got {sigma}"
        );
        Self { sigma }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn pdf(&self, y: f64) -> f64 {
        (-y.abs() / self.sigma).exp() / (2.0 * self.sigma)
    }

    pub fn cdf(&self, y: f64) -> f64 {
        if y < 0.0 {
            0.5 * (y / self.sigma).exp()
        } else {
            1.0 - 0.5 * (-y / self.sigma).exp()
        }
    }

    /// Inverse CDF, defined on (0, 1). quantile(0.5) is exactly 0.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!(p > 0.0 && p < 1.0, "quantile defined on (0, 1), got {p}");
        let v = 2.0 * p - 1.0;
        if v >= 0.0 {
            -self.sigma * (1.0 - v).ln()
        } else {
            self.sigma * (1.0 + v).ln()
        }
    }

    /// Exact inverse-CDF draw from one uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let v = 2.0 * u - 1.0;
        if v >= 0.0 {
            // 1 - v is in (0, 1], so the log is finite.
            -self.sigma * (1.0 - v).ln()
        } else {
            self.sigma * (1.0 + v).ln()
        }
    }

    /// One-sided exponential magnitude with this scale, strictly positive.
    pub(crate) fn sample_magnitude<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        -self.sigma * unit_open(rng).ln()
    }
}

/// Geometric response delay on {1, 2, ...} with ratio exp(-1/L):
/// P(l) = (1 - e^{-1/L}) e^{-(l-1)/L}. Mean is 1/(1 - e^{-1/L}).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayParams {
    l_scale: f64,
}

impl DelayParams {
    /// L must be positive and finite; L -> 0 degenerates to l = 1 always.
    pub fn new(l_scale: f64) -> Self {
        assert!(
            l_scale.is_finite() && l_scale > 0.0,
            "delay scale must be positive and finite, got {l_scale}"
        );
        Self { l_scale }
    }

    pub fn l_scale(&self) -> f64 {
        self.l_scale
    }

    /// P(l), zero for l = 0.
    pub fn pmf(&self, l: u64) -> f64 {
        if l == 0 {
            return 0.0;
        }
        let q = (-1.0 / self.l_scale).exp();
        (1.0 - q) * q.powi((l - 1) as i32)
    }

    pub fn mean(&self) -> f64 {
        1.0 / (1.0 - (-1.0 / self.l_scale).exp())
    }

    /// Inverse-CDF draw; always at least 1.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        // CDF(l) = 1 - q^l with q = e^{-1/L}; invert and floor.
        // ln(1-u) is in [-inf, 0]; with u < 1 it is finite, and division by
        // ln(q) = -1/L keeps the result non-negative.
        1 + ((1.0 - u).ln() * (-self.l_scale)).floor() as u64
    }
}
