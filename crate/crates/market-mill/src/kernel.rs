use rand::Rng;

use crate::dist::LaplaceParams;
use crate::error::{MillError, Result};

/// Conditional-response archetypes. Mill carries the four-blade asymmetry;
/// the other two are one-sided responses against or along the push sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyMode {
    Mill,
    Contrarian,
    TrendFollowing,
}

/// Convex weights over the three response modes. Weights are validated at
/// construction: non-negative, summing to 1 within 1e-12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyMix {
    w_mill: f64,
    w_contrarian: f64,
    w_trend: f64,
}

impl StrategyMix {
    pub fn new(w_mill: f64, w_contrarian: f64, w_trend: f64) -> Result<Self> {
        for (name, w) in [("w_mill", w_mill), ("w_contrarian", w_contrarian), ("w_trend", w_trend)] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(MillError::InvalidConfig(format!(
                    "{name} must be a finite non-negative weight, got {w}"
                )));
            }
        }
        let sum = w_mill + w_contrarian + w_trend;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(MillError::InvalidConfig(format!(
                "strategy weights must sum to 1 within 1e-12, got {sum}"
            )));
        }
        Ok(Self { w_mill, w_contrarian, w_trend })
    }

    pub fn mill_only() -> Self {
        Self { w_mill: 1.0, w_contrarian: 0.0, w_trend: 0.0 }
    }

    /// Trend-heavy mix producing a correlated (same-sign quadrant) portrait.
    pub fn trend_heavy() -> Self {
        Self { w_mill: 0.3, w_contrarian: 0.0, w_trend: 0.7 }
    }

    /// Mill-heavy mix producing the four-blade portrait.
    pub fn mill_heavy() -> Self {
        Self { w_mill: 0.8, w_contrarian: 0.1, w_trend: 0.1 }
    }

    /// Contrarian-heavy mix producing an anticorrelated portrait.
    pub fn contrarian_heavy() -> Self {
        Self { w_mill: 0.3, w_contrarian: 0.7, w_trend: 0.0 }
    }

    pub fn w_mill(&self) -> f64 {
        self.w_mill
    }

    pub fn w_contrarian(&self) -> f64 {
        self.w_contrarian
    }

    pub fn w_trend(&self) -> f64 {
        self.w_trend
    }

    /// Picks a mode from one uniform draw via cumulative weights.
    pub fn choose<R: Rng + ?Sized>(&self, rng: &mut R) -> StrategyMode {
        let u: f64 = rng.random();
        if u < self.w_mill {
            StrategyMode::Mill
        } else if u < self.w_mill + self.w_contrarian {
            StrategyMode::Contrarian
        } else {
            StrategyMode::TrendFollowing
        }
    }
}

/// One of the eight sector wedges of the push-response plane, numbered 1..=8
/// counterclockwise from S1 = {x > 0, 0 < y < x}. Even sectors carry the
/// mill kernel's support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SectorId(u8);

impl SectorId {
    pub fn new(index: u8) -> Result<Self> {
        if (1..=8).contains(&index) {
            Ok(Self(index))
        } else {
            Err(MillError::InvalidConfig(format!("sector index must be 1..=8, got {index}")))
        }
    }

    pub fn index(&self) -> u8 {
        self.0
    }

    pub fn is_even(&self) -> bool {
        self.0.is_multiple_of(2)
    }
}

/// Indicator shaping the mill response: 2 on the support, 0 elsewhere.
/// For x > 0 the support is {y > x} (trend continuation) together with
/// {-x <= y < 0} (contrarian pocket); for x < 0 it is the mirror image.
/// Boundaries follow theta(0) = 0: y = x and y = 0 are outside, y = -x is
/// inside the pocket. Multiplied by the base density it integrates to 1.
///
/// Panics if x is 0; a zero push never reaches the kernel (the asymmetric
/// channel is inert at x = 0).
pub fn f_mill(x: f64, y: f64) -> f64 {
    assert!(x != 0.0, "f_mill is undefined at x = 0; route zero pushes around the kernel");
    if x < 0.0 {
        return f_mill(-x, -y);
    }
    if y > x || (-x <= y && y < 0.0) {
        2.0
    } else {
        0.0
    }
}

/// Probability that a mill response continues beyond the push (|y| > |x| on
/// the push side) rather than landing in the contrarian pocket. Exceeds 1/2
/// exactly when |x| < sigma ln 2.
pub fn trend_branch_probability(x: f64, base: LaplaceParams) -> f64 {
    assert!(x != 0.0, "undefined at x = 0");
    (-x.abs() / base.sigma()).exp()
}

/// Maps a plane point to its sector. Points on a boundary line resolve to
/// the lower-index adjacent sector. The origin is rejected.
pub fn sector_of(x: f64, y: f64) -> SectorId {
    assert!(
        x != 0.0 || y != 0.0,
        "sector_of is undefined at the origin"
    );
    let idx = if x > 0.0 {
        if y > 0.0 {
            if y > x {
                2
            } else {
                1 // includes the boundary y = x
            }
        } else if y < 0.0 {
            if y > -x {
                8
            } else {
                7 // includes the boundary y = -x
            }
        } else {
            1 // positive x-axis, between S8 and S1
        }
    } else if x < 0.0 {
        if y > 0.0 {
            if y < -x {
                4
            } else {
                3 // includes the boundary y = -x
            }
        } else if y < 0.0 {
            if y < x {
                6
            } else {
                5 // includes the boundary y = x
            }
        } else {
            4 // negative x-axis, between S4 and S5
        }
    } else if y > 0.0 {
        2 // positive y-axis, between S2 and S3
    } else {
        6 // negative y-axis, between S6 and S7
    };
    SectorId(idx)
}

/// Draws from the mill response density f_mill(x, y) P_0(y). Two-branch
/// mixture: with probability exp(-|x|/sigma) a continuation beyond the push
/// (|x| plus an exponential), otherwise an exact truncated exponential on
/// the contrarian pocket, closed at -x and open at 0 (for x > 0).
///
/// Panics if x is 0 or parameters are non-finite.
pub fn sample_mill<R: Rng + ?Sized>(x: f64, base: LaplaceParams, rng: &mut R) -> f64 {
    assert!(x.is_finite() && x != 0.0, "sample_mill requires a finite non-zero push");
    if x < 0.0 {
        return -sample_mill_positive(-x, base, rng);
    }
    sample_mill_positive(x, base, rng)
}

fn sample_mill_positive<R: Rng + ?Sized>(x: f64, base: LaplaceParams, rng: &mut R) -> f64 {
    let sigma = base.sigma();
    let p_tail = (-x / sigma).exp();
    let u: f64 = rng.random();
    if u < p_tail {
        // Continuation branch: y = x + Exp(sigma), strictly beyond the push.
        x + base.sample_magnitude(rng)
    } else {
        // Contrarian pocket: inverse CDF of the exponential truncated to
        // [-x, 0); u = 0 maps exactly to -x, the pocket's closed edge.
        let v: f64 = rng.random();
        sigma * (p_tail + v * (1.0 - p_tail)).ln()
    }
}

/// Draws a response of the given mode. Contrarian and TrendFollowing are
/// one-sided exponentials with the base scale, signed against or along the
/// push; Mill delegates to sample_mill.
pub fn sample_mode<R: Rng + ?Sized>(
    mode: StrategyMode,
    x: f64,
    base: LaplaceParams,
    rng: &mut R,
) -> f64 {
    assert!(x.is_finite() && x != 0.0, "sample_mode requires a finite non-zero push");
    match mode {
        StrategyMode::Mill => sample_mill(x, base, rng),
        StrategyMode::Contrarian => -x.signum() * base.sample_magnitude(rng),
        StrategyMode::TrendFollowing => x.signum() * base.sample_magnitude(rng),
    }
}

/// Density of a single mode's response given the push, normalized over y for
/// every x != 0. Mill is f_mill * P_0; the one-sided modes are 2 P_0
/// restricted to the matching half-axis.
pub fn mode_density(mode: StrategyMode, x: f64, y: f64, base: LaplaceParams) -> f64 {
    assert!(x != 0.0, "mode_density is undefined at x = 0");
    match mode {
        StrategyMode::Mill => f_mill(x, y) * base.pdf(y),
        StrategyMode::Contrarian => {
            if x * y < 0.0 {
                2.0 * base.pdf(y)
            } else {
                0.0
            }
        }
        StrategyMode::TrendFollowing => {
            if x * y > 0.0 {
                2.0 * base.pdf(y)
            } else {
                0.0
            }
        }
    }
}

/// One step of the asymmetric channel: with probability nu (zero when the
/// push is zero) a response drawn from the mix, otherwise exactly 0.
pub fn sample_asym<R: Rng + ?Sized>(
    mix: &StrategyMix,
    nu: f64,
    x: f64,
    base: LaplaceParams,
    rng: &mut R,
) -> f64 {
    assert!((0.0..=1.0).contains(&nu), "activation probability must lie in [0, 1]");
    if x == 0.0 {
        return 0.0;
    }
    let u: f64 = rng.random();
    if u >= nu {
        return 0.0;
    }
    let mode = mix.choose(rng);
    sample_mode(mode, x, base, rng)
}
