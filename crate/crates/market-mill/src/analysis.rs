use std::collections::BTreeMap;

use crate::config::MillConfig;
use crate::error::{MillError, Result};
use crate::kernel::sector_of;
use crate::series::{IncrementSeries, PairSet};
use crate::sim::{map_reduce_series, SimBatch};

/// Sums non-overlapping blocks of k increments, scaling dt accordingly.
/// A trailing remainder shorter than k is dropped.
pub fn aggregate(series: &IncrementSeries, k: usize) -> Result<IncrementSeries> {
    if k == 0 {
        return Err(MillError::InvalidConfig("aggregation factor must be at least 1".into()));
    }
    if k > series.len() {
        return Err(MillError::AggregateWindow { k, len: series.len() });
    }
    let sums: Vec<f64> = series
        .increments()
        .chunks_exact(k)
        .map(|chunk| chunk.iter().sum())
        .collect();
    IncrementSeries::new(series.dt_minutes() * k as f64, sums)
}

/// Adjacent (push, response) pairs: (delta p_j, delta p_{j+1}).
pub fn make_pairs(series: &IncrementSeries) -> Result<PairSet> {
    make_pairs_lagged(series, 1)
}

/// Pairs (delta p_j, delta p_{j+lag}) at a fixed positive lag.
pub fn make_pairs_lagged(series: &IncrementSeries, lag: usize) -> Result<PairSet> {
    if lag == 0 {
        return Err(MillError::InvalidConfig("pair lag must be at least 1".into()));
    }
    if series.len() <= lag {
        return Err(MillError::TooShortForPairs(series.len()));
    }
    let inc = series.increments();
    let pairs = (0..inc.len() - lag).map(|j| (inc[j], inc[j + lag])).collect();
    Ok(PairSet::new(series.dt_minutes(), pairs))
}

/// Sector occupation over the closed square |x|, |y| <= delta_p_star.
/// Pairs with a zero coordinate are excluded; boundary points follow the
/// lower-index sector rule.
pub fn sector_counts(pairs: &PairSet, delta_p_star: f64) -> Result<[u64; 8]> {
    if !(delta_p_star.is_finite() && delta_p_star > 0.0) {
        return Err(MillError::InvalidConfig(format!(
            "delta_p_star must be finite and positive, got {delta_p_star}"
        )));
    }
    let mut counts = [0u64; 8];
    for &(x, y) in pairs.pairs() {
        if x == 0.0 || y == 0.0 || x.abs() > delta_p_star || y.abs() > delta_p_star {
            continue;
        }
        counts[(sector_of(x, y).index() - 1) as usize] += 1;
    }
    Ok(counts)
}

/// Millness in percent from sector counts: the even-minus-odd alternating
/// sum over adjacent sector pairs, 100 * [(n8-n1) + (n2-n7) + (n6-n3) +
/// (n4-n5)] / n_tot. delta_p_star only labels the error on empty counts.
pub fn millness_from_counts(counts: [u64; 8], delta_p_star: f64) -> Result<f64> {
    let n_tot: u64 = counts.iter().sum();
    if n_tot == 0 {
        return Err(MillError::EmptySectorCounts(delta_p_star));
    }
    let c = counts.map(|n| n as f64);
    let alt = (c[7] - c[0]) + (c[1] - c[6]) + (c[5] - c[2]) + (c[3] - c[4]);
    Ok(100.0 * alt / n_tot as f64)
}

/// Millness of one pair set.
pub fn millness(pairs: &PairSet, delta_p_star: f64) -> Result<f64> {
    millness_from_counts(sector_counts(pairs, delta_p_star)?, delta_p_star)
}

/// Group-resolved millness at one aggregation level. Each group's rho comes
/// from sector counts pooled over the group's series; mean and sample
/// standard deviation are taken across groups.
#[derive(Debug, Clone)]
pub struct MillnessReport {
    pub dt_minutes: f64,
    pub aggregation: usize,
    pub delta_p_star: f64,
    pub group_rho: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation over groups; None with a single group.
    pub std_dev: Option<f64>,
    /// In-square pairs with both coordinates non-zero, all groups.
    pub n_pairs: u64,
}

impl MillnessReport {
    /// Standard error of the group mean.
    pub fn std_error(&self) -> Option<f64> {
        self.std_dev.map(|s| s / (self.group_rho.len() as f64).sqrt())
    }
}

fn report_from_group_counts(
    group_counts: &[[u64; 8]],
    dt_minutes: f64,
    aggregation: usize,
    delta_p_star: f64,
) -> Result<MillnessReport> {
    let group_rho = group_counts
        .iter()
        .map(|&c| millness_from_counts(c, delta_p_star))
        .collect::<Result<Vec<f64>>>()?;
    let g = group_rho.len() as f64;
    let mean = group_rho.iter().sum::<f64>() / g;
    let std_dev = if group_rho.len() >= 2 {
        let ss: f64 = group_rho.iter().map(|r| (r - mean) * (r - mean)).sum();
        Some((ss / (g - 1.0)).sqrt())
    } else {
        None
    };
    let n_pairs = group_counts.iter().flatten().sum();
    Ok(MillnessReport {
        dt_minutes,
        aggregation,
        delta_p_star,
        group_rho,
        mean,
        std_dev,
        n_pairs,
    })
}

fn series_counts(series: &IncrementSeries, k: usize, delta_p_star: f64) -> Result<[u64; 8]> {
    let aggregated;
    let view = if k == 1 {
        series
    } else {
        aggregated = aggregate(series, k)?;
        &aggregated
    };
    sector_counts(&make_pairs(view)?, delta_p_star)
}

/// Millness over a materialized batch at aggregation k.
pub fn millness_report(batch: &SimBatch, k: usize, delta_p_star: f64) -> Result<MillnessReport> {
    millness_report_for_series(batch.series(), batch.config().n_groups, k, delta_p_star)
}

/// Like millness_report, but over stored series instead of a live batch.
/// Series are grouped into n_groups consecutive blocks, mirroring the batch
/// layout, and must agree on dt_minutes.
pub fn millness_report_for_series(
    series: &[IncrementSeries],
    n_groups: usize,
    k: usize,
    delta_p_star: f64,
) -> Result<MillnessReport> {
    if series.is_empty() {
        return Err(MillError::InvalidConfig("no series to analyze".into()));
    }
    if n_groups == 0 || !series.len().is_multiple_of(n_groups) {
        return Err(MillError::InvalidConfig(format!(
            "{} series cannot split into {n_groups} equal groups",
            series.len()
        )));
    }
    let dt0 = series[0].dt_minutes();
    if series.iter().any(|s| s.dt_minutes() != dt0) {
        return Err(MillError::InvalidConfig(
            "series disagree on dt_minutes; analyze uniform sets".into(),
        ));
    }
    let per = series.len() / n_groups;
    let mut group_counts = vec![[0u64; 8]; n_groups];
    for (i, s) in series.iter().enumerate() {
        let c = series_counts(s, k, delta_p_star)?;
        for (acc, v) in group_counts[i / per].iter_mut().zip(c) {
            *acc += v;
        }
    }
    report_from_group_counts(&group_counts, dt0 * k as f64, k, delta_p_star)
}

/// Simulates the config's batch and reports millness at every requested
/// aggregation without keeping series in memory. Counts are tallied per
/// series and merged, so the result matches millness_report on the
/// materialized batch exactly, for any thread count.
pub fn millness_report_streaming(
    config: &MillConfig,
    ks: &[usize],
    delta_p_star: f64,
) -> Result<Vec<MillnessReport>> {
    if ks.is_empty() {
        return Err(MillError::InvalidConfig("need at least one aggregation level".into()));
    }
    let per_group = config.series_per_group() as u64;
    let n_groups = config.n_groups;
    let tallies: Vec<Vec<[u64; 8]>> = map_reduce_series(
        config,
        |stream, series| {
            let g = (stream / per_group) as usize;
            let mut t = vec![vec![[0u64; 8]; n_groups]; ks.len()];
            for (ki, &k) in ks.iter().enumerate() {
                // Config validation bounds k only at run time; surface
                // failures as empty tallies and re-check below.
                if let Ok(c) = series_counts(series, k, delta_p_star) {
                    t[ki][g] = c;
                }
            }
            t
        },
        |mut a, b| {
            for (ta, tb) in a.iter_mut().zip(&b) {
                for (ga, gb) in ta.iter_mut().zip(tb) {
                    for (x, y) in ga.iter_mut().zip(gb) {
                        *x += y;
                    }
                }
            }
            a
        },
    )?;
    ks.iter()
        .zip(&tallies)
        .map(|(&k, groups)| {
            report_from_group_counts(groups, config.dt0_minutes * k as f64, k, delta_p_star)
        })
        .collect()
}

/// Mean response within one push bin.
#[derive(Debug, Clone, Copy)]
pub struct MeanResponseBin {
    pub x_center: f64,
    pub n: u64,
    pub mean: f64,
    /// Standard error of the mean; None for a single observation.
    pub std_error: Option<f64>,
    /// Set when the bin holds fewer than 30 pairs.
    pub low_confidence: bool,
}

/// Mean response conditioned on the push, binned by x with the given width.
/// Bins are [m w, (m+1) w) for integer m; only occupied bins are returned,
/// in ascending x order.
pub fn conditional_mean_response(
    pairs: &PairSet,
    bin_width: f64,
) -> Result<Vec<MeanResponseBin>> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(MillError::InvalidConfig(format!(
            "bin width must be finite and positive, got {bin_width}"
        )));
    }
    if pairs.is_empty() {
        return Err(MillError::EmptyPairs);
    }
    let mut bins: BTreeMap<i64, (u64, f64, f64)> = BTreeMap::new();
    for &(x, y) in pairs.pairs() {
        let key = (x / bin_width).floor() as i64;
        let e = bins.entry(key).or_insert((0, 0.0, 0.0));
        e.0 += 1;
        e.1 += y;
        e.2 += y * y;
    }
    Ok(bins
        .into_iter()
        .map(|(key, (n, sum, sumsq))| {
            let nf = n as f64;
            let mean = sum / nf;
            let std_error = if n >= 2 {
                let var = ((sumsq - nf * mean * mean) / (nf - 1.0)).max(0.0);
                Some((var / nf).sqrt())
            } else {
                None
            };
            MeanResponseBin {
                x_center: (key as f64 + 0.5) * bin_width,
                n,
                mean,
                std_error,
                low_confidence: n < 30,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::simulate_batch;

    fn series(vals: Vec<f64>) -> IncrementSeries {
        IncrementSeries::new(1.0, vals).unwrap()
    }

    #[test]
    fn aggregate_sums_blocks_and_scales_dt() {
        let s = series(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let a = aggregate(&s, 2).unwrap();
        assert_eq!(a.increments(), &[3.0, 7.0]);
        assert_eq!(a.dt_minutes(), 2.0);
        let whole = aggregate(&s, 5).unwrap();
        assert_eq!(whole.increments(), &[15.0]);
        assert_eq!(aggregate(&s, 1).unwrap().increments(), s.increments());
    }

    #[test]
    fn aggregate_rejects_bad_windows() {
        let s = series(vec![1.0, 2.0]);
        assert!(matches!(aggregate(&s, 0), Err(MillError::InvalidConfig(_))));
        assert!(matches!(
            aggregate(&s, 3),
            Err(MillError::AggregateWindow { k: 3, len: 2 })
        ));
    }

    #[test]
    fn pairs_are_adjacent_increments() {
        let s = series(vec![1.0, 2.0, 3.0]);
        let p = make_pairs(&s).unwrap();
        assert_eq!(p.pairs(), &[(1.0, 2.0), (2.0, 3.0)]);
        assert_eq!(p.dt_minutes(), 1.0);
    }

    #[test]
    fn lagged_pairs_skip_ahead() {
        let s = series(vec![1.0, 2.0, 3.0, 4.0]);
        let p = make_pairs_lagged(&s, 2).unwrap();
        assert_eq!(p.pairs(), &[(1.0, 3.0), (2.0, 4.0)]);
        assert!(make_pairs_lagged(&s, 0).is_err());
        assert!(matches!(
            make_pairs_lagged(&s, 4),
            Err(MillError::TooShortForPairs(4))
        ));
    }

    #[test]
    fn single_increment_cannot_pair() {
        assert!(matches!(
            make_pairs(&series(vec![1.0])),
            Err(MillError::TooShortForPairs(1))
        ));
    }

    #[test]
    fn sector_counts_respect_square_zeros_and_boundaries() {
        let p = PairSet::new(1.0, vec![
            (0.10, -0.05),   // S8
            (0.30, -0.05),   // S8, on the closed edge
            (0.3001, -0.05), // outside
            (0.0, 0.05),     // zero push, excluded
            (0.05, 0.0),     // zero response, excluded
            (-0.10, 0.05),   // S4
        ]);
        let c = sector_counts(&p, 0.3).unwrap();
        assert_eq!(c, [0, 0, 0, 1, 0, 0, 0, 2]);
        assert!(sector_counts(&p, 0.0).is_err());
    }

    #[test]
    fn millness_hand_value() {
        // two pairs in every even sector, one in every odd: 100 * 4/12
        let evens = [(0.10, -0.05), (0.05, 0.10), (-0.05, -0.10), (-0.10, 0.05)];
        let odds = [(0.10, 0.05), (-0.05, 0.10), (-0.10, -0.05), (0.05, -0.10)];
        let mut pts: Vec<(f64, f64)> = Vec::new();
        pts.extend(evens);
        pts.extend(evens);
        pts.extend(odds);
        let rho = millness(&PairSet::new(1.0, pts), 0.3).unwrap();
        assert!((rho - 100.0 * 4.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn millness_saturates_at_plus_minus_hundred() {
        let even = PairSet::new(1.0, vec![(0.10, -0.05); 5]);
        assert_eq!(millness(&even, 0.3).unwrap(), 100.0);
        let odd = PairSet::new(1.0, vec![(0.10, 0.05); 5]);
        assert_eq!(millness(&odd, 0.3).unwrap(), -100.0);
    }

    #[test]
    fn empty_square_is_an_error() {
        let p = PairSet::new(1.0, vec![(0.5, 0.5)]);
        assert!(matches!(
            millness(&p, 0.3),
            Err(MillError::EmptySectorCounts(_))
        ));
    }

    #[test]
    fn streaming_report_matches_batch_report() {
        let cfg = MillConfig {
            series_len: 4000,
            n_series: 6,
            n_groups: 3,
            seed: 11,
            ..MillConfig::elementary_reference()
        };
        let batch = simulate_batch(&cfg).unwrap();
        for k in [1usize, 3] {
            let from_batch = millness_report(&batch, k, 0.3).unwrap();
            let streamed = &millness_report_streaming(&cfg, &[1, 3], 0.3).unwrap()[if k == 1 {
                0
            } else {
                1
            }];
            assert_eq!(from_batch.group_rho, streamed.group_rho);
            assert_eq!(from_batch.n_pairs, streamed.n_pairs);
            assert_eq!(from_batch.aggregation, k);
            assert_eq!(from_batch.dt_minutes, k as f64);
        }
    }

    #[test]
    fn series_slice_report_matches_batch_report() {
        let cfg = MillConfig {
            series_len: 4000,
            n_series: 6,
            n_groups: 3,
            seed: 13,
            ..MillConfig::elementary_reference()
        };
        let batch = simulate_batch(&cfg).unwrap();
        let from_batch = millness_report(&batch, 2, 0.3).unwrap();
        let from_slice =
            millness_report_for_series(batch.series(), cfg.n_groups, 2, 0.3).unwrap();
        assert_eq!(from_batch.group_rho, from_slice.group_rho);
        assert_eq!(from_batch.n_pairs, from_slice.n_pairs);
        assert_eq!(from_batch.dt_minutes, from_slice.dt_minutes);

        assert!(millness_report_for_series(&[], 1, 1, 0.3).is_err());
        assert!(millness_report_for_series(batch.series(), 4, 1, 0.3).is_err());
        let mixed = vec![
            IncrementSeries::new(1.0, vec![0.1, -0.1, 0.1]).unwrap(),
            IncrementSeries::new(2.0, vec![0.1, -0.1, 0.1]).unwrap(),
        ];
        assert!(millness_report_for_series(&mixed, 1, 1, 0.3).is_err());
    }

    #[test]
    fn report_statistics_shape() {
        let cfg = MillConfig {
            series_len: 3000,
            n_series: 4,
            n_groups: 4,
            seed: 5,
            ..MillConfig::elementary_reference()
        };
        let r = &millness_report_streaming(&cfg, &[1], 0.3).unwrap()[0];
        assert_eq!(r.group_rho.len(), 4);
        assert!(r.mean.is_finite());
        assert!(r.std_dev.unwrap() >= 0.0);
        assert!(r.std_error().unwrap() <= r.std_dev.unwrap());
        assert!(r.n_pairs > 0);

        let single = MillConfig { n_groups: 1, ..cfg };
        let r1 = &millness_report_streaming(&single, &[1], 0.3).unwrap()[0];
        assert!(r1.std_dev.is_none());
        assert!(r1.std_error().is_none());
    }

    #[test]
    fn mean_response_hand_bins() {
        let p = PairSet::new(1.0, vec![(0.005, 1.0), (0.005, 3.0), (-0.012, 5.0)]);
        let bins = conditional_mean_response(&p, 0.01).unwrap();
        assert_eq!(bins.len(), 2);
        assert!((bins[0].x_center + 0.015).abs() < 1e-12);
        assert_eq!(bins[0].n, 1);
        assert_eq!(bins[0].mean, 5.0);
        assert!(bins[0].std_error.is_none());
        assert!(bins[0].low_confidence);
        assert!((bins[1].x_center - 0.005).abs() < 1e-12);
        assert_eq!(bins[1].n, 2);
        assert_eq!(bins[1].mean, 2.0);
        assert!((bins[1].std_error.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mean_response_rejects_bad_input() {
        let p = PairSet::new(1.0, vec![(0.1, 0.1)]);
        assert!(conditional_mean_response(&p, 0.0).is_err());
        let empty = PairSet::new(1.0, vec![]);
        assert!(matches!(
            conditional_mean_response(&empty, 0.01),
            Err(MillError::EmptyPairs)
        ));
    }
}
