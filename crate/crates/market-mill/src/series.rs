use crate::error::{MillError, Result};

/// Price increments in dollars. Finiteness is enforced when a series is
/// built; everything downstream may assume no NaN or infinity.
pub type Money = f64;

/// A uniformly sampled series of price increments at a fixed base interval.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSeries {
    dt_minutes: f64,
    increments: Vec<Money>,
}

impl IncrementSeries {
    /// Wraps raw increments, rejecting NaN and infinities.
    pub fn new(dt_minutes: f64, increments: Vec<Money>) -> Result<Self> {
        if !(dt_minutes.is_finite() && dt_minutes > 0.0) {
            return Err(MillError::InvalidConfig(format!(
                "dt_minutes must be positive and finite, got {dt_minutes}"
            )));
        }
        if increments.is_empty() {
            return Err(MillError::InvalidConfig("series must not be empty".into()));
        }
        if let Some(i) = increments.iter().position(|v| !v.is_finite()) {
            return Err(MillError::NonFiniteIncrement(i));
        }
        Ok(Self { dt_minutes, increments })
    }

    pub fn dt_minutes(&self) -> f64 {
        self.dt_minutes
    }

    pub fn increments(&self) -> &[Money] {
        &self.increments
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    /// Internal constructor for simulator output, which is finite by
    /// construction (every sampler maps uniforms through finite closed forms).
    pub(crate) fn from_simulated(dt_minutes: f64, increments: Vec<Money>) -> Self {
        debug_assert!(increments.iter().all(|v| v.is_finite()));
        Self { dt_minutes, increments }
    }
}

/// Adjacent (push, response) increment pairs at a common time scale.
#[derive(Debug, Clone)]
pub struct PairSet {
    dt_minutes: f64,
    pairs: Vec<(Money, Money)>,
}

impl PairSet {
    pub fn new(dt_minutes: f64, pairs: Vec<(Money, Money)>) -> Self {
        Self { dt_minutes, pairs }
    }

    pub fn dt_minutes(&self) -> f64 {
        self.dt_minutes
    }

    pub fn pairs(&self) -> &[(Money, Money)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pools several pair sets measured at the same time scale.
    pub fn pooled<'a, I>(sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a PairSet>,
    {
        let mut iter = sets.into_iter();
        let first = iter.next().ok_or(MillError::EmptyPairs)?;
        let mut pairs = first.pairs.clone();
        for s in iter {
            assert_eq!(
                s.dt_minutes, first.dt_minutes,
                "cannot pool pair sets at different time scales"
            );
            pairs.extend_from_slice(&s.pairs);
        }
        Ok(Self { dt_minutes: first.dt_minutes, pairs })
    }
}
