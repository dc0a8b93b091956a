//! Simulation and analysis of conditional intraday price dynamics built
//! around the "market mill" response kernel.
//!
//! The model: price increments are iid Laplace noise, plus a probabilistic
//! asymmetric channel that reacts to the recent push (the sum of the last i
//! increments at scale i) with a delayed response. The mill kernel doubles
//! the noise density beyond the push and on the opposing pocket, producing a
//! four-blade asymmetry in the (push, response) plane; contrarian and
//! trend-following kernels are one-sided alternatives.
//!
//! Module map:
//! - [`dist`]: Laplace base noise and the geometric response delay.
//! - [`kernel`]: response kernels, sector geometry, strategy mixes.
//! - [`oracle`]: quadrature reference for the one-step conditional density.
//! - [`config`] and [`sim`]: run parameters and the multi-scale simulator
//!   with per-stream determinism.
//! - [`analysis`]: aggregation, pair building, millness statistics,
//!   conditional mean response.
//! - [`histogram`]: bivariate histograms and asymmetric-component patterns.
//!
//! Determinism: a run is fully determined by (seed, series index); batches
//! are bit-identical for any thread count.

pub mod analysis;
pub mod config;
pub mod dist;
pub mod error;
pub mod histogram;
pub mod kernel;
mod numeric;
pub mod oracle;
pub mod rng;
pub mod series;
pub mod sim;

pub use analysis::{
    aggregate, conditional_mean_response, make_pairs, make_pairs_lagged, millness,
    millness_from_counts, millness_report, millness_report_for_series,
    millness_report_streaming, sector_counts, MeanResponseBin, MillnessReport,
};
pub use config::{MillConfig, NU_CUTOFF};
pub use dist::{DelayParams, LaplaceParams};
pub use error::{MillError, Result};
pub use histogram::{asymmetric_component, AsymmetryAxis, AsymmetryPattern, BivariateHistogram};
pub use kernel::{
    f_mill, mode_density, sample_asym, sample_mill, sample_mode, sector_of,
    trend_branch_probability, SectorId, StrategyMix, StrategyMode,
};
pub use oracle::conditional_density;
pub use rng::series_rng;
pub use series::{IncrementSeries, Money, PairSet};
pub use sim::{
    map_reduce_series, scale_specs, simulate_batch, simulate_composite,
    simulate_composite_stream, simulate_composite_traced, simulate_elementary, simulate_noise,
    simulate_noise_stream, BatchDiagnostics, DepositRecord, ScaleSpec, ScaleStats, SimBatch,
    SimTrace,
};
