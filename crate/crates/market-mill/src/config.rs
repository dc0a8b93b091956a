use crate::dist::LaplaceParams;
use crate::error::{MillError, Result};
use crate::kernel::StrategyMix;
use crate::sim::scale_specs;

/// Activation probabilities below this are treated as inert: the scale
/// cascade truncates at the first scale whose nu falls under it.
pub const NU_CUTOFF: f64 = 1e-3;

/// Full parameter set for one simulation run.
///
/// `sigma0` is the Laplace scale parameter of the base noise in dollars by
/// default; set `sigma0_is_std_dev` to read it as the standard deviation
/// instead (scale = sigma0 / sqrt(2)). Scale i of the cascade uses activation
/// nu0 * scale_decay^(i-1), mean-free response width sqrt(i) * base scale and
/// delay scale i * l_scale.
#[derive(Debug, Clone, PartialEq)]
pub struct MillConfig {
    pub sigma0: f64,
    pub sigma0_is_std_dev: bool,
    pub nu0: f64,
    pub l_scale: f64,
    pub n_scales: usize,
    pub scale_decay: f64,
    pub series_len: usize,
    pub n_series: usize,
    pub n_groups: usize,
    pub seed: u64,
    pub strategy_weights: StrategyMix,
    pub dt0_minutes: f64,
}

impl MillConfig {
    /// Single-scale run sized like the reference experiment: 2000 series of
    /// 195 000 one-minute increments in 20 groups, mill-only responses.
    pub fn elementary_reference() -> Self {
        Self {
            sigma0: 0.02,
            sigma0_is_std_dev: false,
            nu0: 0.12,
            l_scale: 3.0,
            n_scales: 1,
            scale_decay: 0.8,
            series_len: 195_000,
            n_series: 2000,
            n_groups: 20,
            seed: 1,
            strategy_weights: StrategyMix::mill_only(),
            dt0_minutes: 1.0,
        }
    }

    /// Multi-scale run with the same sizing; 40 configured scales, of which
    /// the nu cutoff leaves 22 active.
    pub fn composite_reference() -> Self {
        Self { n_scales: 40, ..Self::elementary_reference() }
    }

    /// Shrinks the run to 400 series of 40 000 increments, keeping the group
    /// count, for fast smoke-scale estimates.
    pub fn desk_scale(mut self) -> Self {
        self.n_series = 400;
        self.series_len = 40_000;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(MillError::InvalidConfig(msg));
        if !(self.sigma0.is_finite() && self.sigma0 > 0.0) {
            return fail(format!("sigma0 must be finite and positive, got {}", self.sigma0));
        }
        if !(self.nu0.is_finite() && (0.0..=1.0).contains(&self.nu0)) {
            return fail(format!("nu0 must lie in [0, 1], got {}", self.nu0));
        }
        if !(self.l_scale.is_finite() && self.l_scale > 0.0) {
            return fail(format!("l_scale must be finite and positive, got {}", self.l_scale));
        }
        if self.n_scales == 0 {
            return fail("n_scales must be at least 1".into());
        }
        if !(self.scale_decay.is_finite() && self.scale_decay > 0.0 && self.scale_decay <= 1.0) {
            return fail(format!("scale_decay must lie in (0, 1], got {}", self.scale_decay));
        }
        if self.series_len <= self.n_scales {
            return fail(format!(
                "series_len ({}) must exceed n_scales ({}) so every push window fits",
                self.series_len, self.n_scales
            ));
        }
        if self.n_series == 0 {
            return fail("n_series must be at least 1".into());
        }
        if self.n_groups == 0 {
            return fail("n_groups must be at least 1".into());
        }
        if !self.n_series.is_multiple_of(self.n_groups) {
            return fail(format!(
                "n_series ({}) must be divisible by n_groups ({})",
                self.n_series, self.n_groups
            ));
        }
        if !(self.dt0_minutes.is_finite() && self.dt0_minutes > 0.0) {
            return fail(format!(
                "dt0_minutes must be finite and positive, got {}",
                self.dt0_minutes
            ));
        }
        let nu_sum: f64 = scale_specs(self).iter().map(|s| s.nu).sum();
        if nu_sum > 1.0 + 1e-12 {
            return fail(format!(
                "active activation probabilities sum to {nu_sum:.6}, which exceeds 1; \
                 lower nu0 or scale_decay"
            ));
        }
        Ok(())
    }

    /// Laplace scale parameter of the base noise in dollars.
    pub fn base_scale(&self) -> f64 {
        if self.sigma0_is_std_dev {
            self.sigma0 / std::f64::consts::SQRT_2
        } else {
            self.sigma0
        }
    }

    pub fn base_laplace(&self) -> LaplaceParams {
        LaplaceParams::new(self.base_scale())
    }

    pub fn series_per_group(&self) -> usize {
        self.n_series / self.n_groups
    }
}
