use rand::Rng;
use rayon::prelude::*;

use crate::config::{MillConfig, NU_CUTOFF};
use crate::dist::{DelayParams, LaplaceParams};
use crate::error::{MillError, Result};
use crate::kernel::sample_mode;
use crate::rng::series_rng;
use crate::series::IncrementSeries;

/// Parameters of one active cascade scale. `index` is 1-based; scale i reads
/// the sum of the last i increments as its push, responds with width
/// sqrt(i) times the base scale and delays with scale i * l_scale.
#[derive(Debug, Clone, Copy)]
pub struct ScaleSpec {
    pub index: usize,
    pub nu: f64,
    pub delay: DelayParams,
    pub response: LaplaceParams,
}

/// Expands the config into its active scales: nu decays geometrically from
/// nu0 and the cascade truncates at the first scale below NU_CUTOFF.
/// Truncation keeps output identical between a config listing only the
/// active scales and one padded with inert ones.
pub fn scale_specs(config: &MillConfig) -> Vec<ScaleSpec> {
    let base = config.base_scale();
    let mut specs = Vec::new();
    let mut nu = config.nu0;
    for i in 1..=config.n_scales {
        if nu < NU_CUTOFF {
            break;
        }
        specs.push(ScaleSpec {
            index: i,
            nu,
            delay: DelayParams::new(i as f64 * config.l_scale),
            response: LaplaceParams::new((i as f64).sqrt() * base),
        });
        nu *= config.scale_decay;
    }
    specs
}

/// Per-scale tallies over a forward pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScaleStats {
    /// Steps at which the scale rolled its activation draw.
    pub evaluations: u64,
    /// Activations (draw under nu), including those on a zero push.
    pub activations: u64,
    /// Activations skipped because the push window summed to exactly zero.
    pub zero_pushes: u64,
    /// Responses added to a future increment.
    pub deposits: u64,
    /// Responses whose delay landed past the end of the series.
    pub dropped: u64,
}

impl ScaleStats {
    fn merge(&mut self, other: &ScaleStats) {
        self.evaluations += other.evaluations;
        self.activations += other.activations;
        self.zero_pushes += other.zero_pushes;
        self.deposits += other.deposits;
        self.dropped += other.dropped;
    }
}

/// One recorded response deposit, for causality and mass accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepositRecord {
    pub scale_index: usize,
    /// Index of the increment closing the push window.
    pub push_end: usize,
    /// Index the response was added to; always > push_end.
    pub target: usize,
    pub amount: f64,
}

/// Diagnostics of one traced forward pass.
#[derive(Debug, Clone, Default)]
pub struct SimTrace {
    pub per_scale: Vec<ScaleStats>,
    pub deposits: Vec<DepositRecord>,
}

/// Aggregated tallies over a batch.
#[derive(Debug, Clone, Default)]
pub struct BatchDiagnostics {
    pub per_scale: Vec<ScaleStats>,
}

impl BatchDiagnostics {
    fn merge(&mut self, per_scale: &[ScaleStats]) {
        if self.per_scale.is_empty() {
            self.per_scale = per_scale.to_vec();
        } else {
            for (a, b) in self.per_scale.iter_mut().zip(per_scale) {
                a.merge(b);
            }
        }
    }

    pub fn total_deposits(&self) -> u64 {
        self.per_scale.iter().map(|s| s.deposits).sum()
    }

    pub fn total_dropped(&self) -> u64 {
        self.per_scale.iter().map(|s| s.dropped).sum()
    }

    /// Fraction of generated responses lost to the end-of-series cutoff.
    pub fn dropped_fraction(&self) -> f64 {
        let total = self.total_deposits() + self.total_dropped();
        if total == 0 {
            0.0
        } else {
            self.total_dropped() as f64 / total as f64
        }
    }
}

/// A batch of simulated series plus run-wide diagnostics. Series i came from
/// RNG stream i of the config's seed; groups are consecutive runs of
/// n_series / n_groups series.
#[derive(Debug, Clone)]
pub struct SimBatch {
    config: MillConfig,
    series: Vec<IncrementSeries>,
    diagnostics: BatchDiagnostics,
}

impl SimBatch {
    pub fn config(&self) -> &MillConfig {
        &self.config
    }

    pub fn series(&self) -> &[IncrementSeries] {
        &self.series
    }

    pub fn diagnostics(&self) -> &BatchDiagnostics {
        &self.diagnostics
    }

    /// Series of one group, counted from 0.
    pub fn group(&self, g: usize) -> &[IncrementSeries] {
        let per = self.config.series_per_group();
        &self.series[g * per..(g + 1) * per]
    }
}

/// Draws a pure-noise series on the given RNG stream: iid Laplace
/// increments, no asymmetric channel.
pub fn simulate_noise_stream(config: &MillConfig, stream: u64) -> Result<IncrementSeries> {
    config.validate()?;
    let base = config.base_laplace();
    let mut rng = series_rng(config.seed, stream);
    let inc: Vec<f64> = (0..config.series_len).map(|_| base.sample(&mut rng)).collect();
    Ok(IncrementSeries::from_simulated(config.dt0_minutes, inc))
}

/// Noise-only series on stream 0.
pub fn simulate_noise(config: &MillConfig) -> Result<IncrementSeries> {
    simulate_noise_stream(config, 0)
}

/// Single-scale simulation on stream 0. Requires n_scales == 1; delegates to
/// the composite pass, whose single-scale case it is bit for bit.
pub fn simulate_elementary(config: &MillConfig) -> Result<IncrementSeries> {
    if config.n_scales != 1 {
        return Err(MillError::InvalidConfig(format!(
            "simulate_elementary requires n_scales == 1, got {}; use simulate_composite",
            config.n_scales
        )));
    }
    simulate_composite(config)
}

/// Multi-scale simulation on stream 0.
pub fn simulate_composite(config: &MillConfig) -> Result<IncrementSeries> {
    simulate_composite_stream(config, 0)
}

/// Multi-scale simulation on an explicit RNG stream.
pub fn simulate_composite_stream(config: &MillConfig, stream: u64) -> Result<IncrementSeries> {
    config.validate()?;
    Ok(forward_pass(config, stream, false).0)
}

/// Like simulate_composite_stream but also records every deposit.
pub fn simulate_composite_traced(
    config: &MillConfig,
    stream: u64,
) -> Result<(IncrementSeries, SimTrace)> {
    config.validate()?;
    let (series, trace) = forward_pass(config, stream, true);
    Ok((series, trace))
}

fn forward_pass(config: &MillConfig, stream: u64, record: bool) -> (IncrementSeries, SimTrace) {
    let scales = scale_specs(config);
    let n = config.series_len;
    let mut rng = series_rng(config.seed, stream);
    let base = config.base_laplace();
    let mut inc: Vec<f64> = (0..n).map(|_| base.sample(&mut rng)).collect();

    let mut trace = SimTrace {
        per_scale: vec![ScaleStats::default(); scales.len()],
        deposits: Vec::new(),
    };
    if scales.is_empty() {
        return (IncrementSeries::from_simulated(config.dt0_minutes, inc), trace);
    }

    // Scales start acting once the widest push window fits, at the index
    // where the longest active window [j - i + 1, j] first lies in range.
    let start = scales.len() - 1;
    for j in start..n {
        for (k, sc) in scales.iter().enumerate() {
            let stats = &mut trace.per_scale[k];
            stats.evaluations += 1;
            let u: f64 = rng.random();
            if u >= sc.nu {
                continue;
            }
            stats.activations += 1;
            let x: f64 = inc[j + 1 - sc.index..=j].iter().sum();
            if x == 0.0 {
                stats.zero_pushes += 1;
                continue;
            }
            let delay = sc.delay.sample(&mut rng) as usize;
            let target = j + delay;
            if target >= n {
                stats.dropped += 1;
                continue;
            }
            let mode = config.strategy_weights.choose(&mut rng);
            let y = sample_mode(mode, x, sc.response, &mut rng);
            inc[target] += y;
            stats.deposits += 1;
            if record {
                trace.deposits.push(DepositRecord {
                    scale_index: sc.index,
                    push_end: j,
                    target,
                    amount: y,
                });
            }
        }
    }
    (IncrementSeries::from_simulated(config.dt0_minutes, inc), trace)
}

/// Simulates the whole batch in parallel, series i on stream i. Output is
/// identical for any thread count.
pub fn simulate_batch(config: &MillConfig) -> Result<SimBatch> {
    config.validate()?;
    let results: Vec<(IncrementSeries, SimTrace)> = (0..config.n_series as u64)
        .into_par_iter()
        .map(|stream| forward_pass(config, stream, false))
        .collect();
    let mut diagnostics = BatchDiagnostics::default();
    let mut series = Vec::with_capacity(results.len());
    for (s, t) in results {
        diagnostics.merge(&t.per_scale);
        series.push(s);
    }
    Ok(SimBatch { config: config.clone(), series, diagnostics })
}

/// Simulates every series of the batch without keeping them: each series is
/// mapped to a summary as it is produced and the summaries are merged. The
/// merge must be associative and commutative for the result to be
/// independent of thread count and scheduling; integer tallies qualify,
/// float accumulation in general does not.
pub fn map_reduce_series<T, M, R>(config: &MillConfig, map: M, reduce: R) -> Result<T>
where
    T: Send,
    M: Fn(u64, &IncrementSeries) -> T + Sync,
    R: Fn(T, T) -> T + Sync + Send,
{
    config.validate()?;
    let out = (0..config.n_series as u64)
        .into_par_iter()
        .map(|stream| {
            let (series, _) = forward_pass(config, stream, false);
            map(stream, &series)
        })
        .reduce_with(reduce)
        .expect("n_series >= 1 is enforced by validate");
    Ok(out)
}
