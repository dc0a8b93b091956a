//! Behavioral invariants of the forward simulation.

mod common;

use common::mean_and_se;
use market_mill::{
    millness_report_streaming, simulate_batch, simulate_composite, simulate_composite_stream,
    simulate_composite_traced, simulate_elementary, simulate_noise_stream, MillConfig,
    StrategyMix,
};

fn small(n_scales: usize, seed: u64) -> MillConfig {
    MillConfig {
        series_len: 20_000,
        n_series: 8,
        n_groups: 4,
        n_scales,
        seed,
        ..MillConfig::elementary_reference()
    }
}

#[test]
fn elementary_is_the_single_scale_composite() {
    let cfg = small(1, 31);
    let a = simulate_elementary(&cfg).unwrap();
    let b = simulate_composite(&cfg).unwrap();
    assert_eq!(a.increments(), b.increments());
}

#[test]
fn inert_padding_scales_do_not_change_the_output() {
    // nu_i drops under the cutoff after scale 22; everything past it is
    // never drawn, so configs differing only in dead scales agree exactly.
    let a = simulate_composite_stream(&small(22, 32), 5).unwrap();
    let b = simulate_composite_stream(&small(40, 32), 5).unwrap();
    assert_eq!(a.increments(), b.increments());
}

#[test]
fn replaying_recorded_deposits_rebuilds_the_series() {
    let cfg = small(5, 33);
    for stream in [0u64, 3] {
        let (series, trace) = simulate_composite_traced(&cfg, stream).unwrap();
        let noise = simulate_noise_stream(&cfg, stream).unwrap();
        let mut rebuilt = noise.increments().to_vec();
        for d in &trace.deposits {
            rebuilt[d.target] += d.amount;
        }
        assert_eq!(rebuilt, series.increments());
    }
}

#[test]
fn batch_is_bit_identical_across_thread_counts() {
    let cfg = small(3, 34);
    let mut outputs: Vec<Vec<Vec<f64>>> = Vec::new();
    for threads in [1usize, 2, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let batch = pool.install(|| simulate_batch(&cfg).unwrap());
        outputs.push(batch.series().iter().map(|s| s.increments().to_vec()).collect());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn streaming_reports_are_thread_count_invariant() {
    let cfg = small(2, 35);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| millness_report_streaming(&cfg, &[1, 3], 0.3).unwrap())
    };
    let a = run(1);
    let b = run(4);
    for (ra, rb) in a.iter().zip(&b) {
        assert_eq!(ra.group_rho, rb.group_rho);
        assert_eq!(ra.n_pairs, rb.n_pairs);
    }
}

#[test]
fn seeds_change_everything_streams_stay_disjoint() {
    let a = simulate_composite_stream(&small(1, 40), 0).unwrap();
    let b = simulate_composite_stream(&small(1, 41), 0).unwrap();
    assert_ne!(a.increments(), b.increments());
    let c = simulate_composite_stream(&small(1, 40), 1).unwrap();
    let first_mismatch = a
        .increments()
        .iter()
        .zip(c.increments())
        .position(|(u, v)| u != v);
    assert_eq!(first_mismatch, Some(0));
}

#[test]
fn activation_frequency_tracks_nu_per_scale() {
    let cfg = MillConfig { series_len: 120_000, ..small(3, 36) };
    let (_, trace) = simulate_composite_traced(&cfg, 0).unwrap();
    let nus = [0.12, 0.096, 0.0768];
    for (stats, nu) in trace.per_scale.iter().zip(nus) {
        let f = stats.activations as f64 / stats.evaluations as f64;
        let se = (nu * (1.0 - nu) / stats.evaluations as f64).sqrt();
        assert!((f - nu).abs() < 4.0 * se, "activation rate {f} vs nu {nu}");
    }
}

#[test]
fn dropped_responses_match_the_delay_tail() {
    // A response activated at step j is dropped iff its delay overshoots the
    // end; summed over steps that is about mean_delay activations per scale,
    // so the dropped fraction is roughly mean_delay / series_len.
    let cfg = MillConfig { series_len: 2000, l_scale: 200.0, n_series: 4, ..small(1, 37) };
    let batch = simulate_batch(&cfg).unwrap();
    let frac = batch.diagnostics().dropped_fraction();
    assert!(batch.diagnostics().total_dropped() > 0);
    let expect = 200.5 / 2000.0;
    assert!(
        frac > 0.3 * expect && frac < 3.0 * expect,
        "dropped fraction {frac} vs rough estimate {expect}"
    );
}

#[test]
fn contrarian_and_trend_mirror_each_other_statistically() {
    let contra = MillConfig {
        strategy_weights: StrategyMix::new(0.0, 1.0, 0.0).unwrap(),
        series_len: 60_000,
        n_series: 16,
        n_groups: 16,
        ..small(1, 38)
    };
    let trend = MillConfig {
        strategy_weights: StrategyMix::new(0.0, 0.0, 1.0).unwrap(),
        ..contra.clone()
    };
    let rc = &millness_report_streaming(&contra, &[1], 0.3).unwrap()[0];
    let rt = &millness_report_streaming(&trend, &[1], 0.3).unwrap()[0];
    let (mc, sc) = mean_and_se(&rc.group_rho);
    let (mt, st) = mean_and_se(&rt.group_rho);
    // Expected value is -0.25 * nu * P(l = 1) * 100 / (in-square mass),
    // about -0.85% for these parameters, mirrored for trend-following.
    assert!(mc < -3.0 * sc, "contrarian millness {mc} +- {sc}");
    assert!(mt > 3.0 * st, "trend millness {mt} +- {st}");
    let combined = (sc * sc + st * st).sqrt();
    assert!(
        (mc + mt).abs() < 4.0 * combined,
        "mirror asymmetry {mc} vs {mt}"
    );
}

#[test]
fn millness_positive_for_elementary_mill() {
    let cfg = MillConfig { series_len: 60_000, n_series: 16, n_groups: 16, ..small(1, 39) };
    let r = &millness_report_streaming(&cfg, &[1], 0.3).unwrap()[0];
    let (m, se) = mean_and_se(&r.group_rho);
    assert!(m > 3.0 * se, "elementary millness {m} +- {se}");
}
