//! Subcommand implementations. Simulation runs in bounded chunks so full
//! reference batches stream to disk instead of materializing gigabytes.

use std::fs;
use std::path::Path;

use market_mill::{
    asymmetric_component, make_pairs, map_reduce_series, millness_report_for_series, scale_specs,
    sector_of, simulate_composite_traced, AsymmetryAxis, AsymmetryPattern, BivariateHistogram,
    IncrementSeries, MillConfig, MillnessReport, ScaleStats, StrategyMix,
};
use rayon::prelude::*;

use crate::cfgfile::{fmt_num, parse_config_text, render_summary};
use crate::emit::{
    render_millness_table, write_grid_csv, write_grid_ppm, write_millness_csv, GridKind,
};
use crate::error::{io_err, CliError, Result};
use crate::ingest::{parse_session, parse_ticks, resample, write_price_path_csv};
use crate::manifest::ManifestBuilder;
use crate::store::{read_input, write_series_binary, write_series_csv};
use crate::{
    AxisArg, GlobalOpts, IngestArgs, MillnessArgs, PatternArgs, PortraitArgs, PresetArg,
    SeriesFormat, SimulateArgs, StoreFormat,
};

/// Series simulated per parallel flush; bounds peak memory at roughly
/// CHUNK * series_len * 8 bytes.
const CHUNK: usize = 64;

fn load_config_file(path: &Path) -> Result<MillConfig> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_config_text(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// A run config comes from --config or from a preset, not both.
fn resolve_config(
    global: &GlobalOpts,
    preset: Option<PresetArg>,
    fallback: MillConfig,
) -> Result<MillConfig> {
    let mut cfg = match (&global.config, preset) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either --config or --preset, not both".into(),
            ));
        }
        (Some(path), None) => load_config_file(path)?,
        (None, Some(p)) => p.config(),
        (None, None) => fallback,
    };
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn create_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn add_stats(acc: &mut [ScaleStats], per_scale: &[ScaleStats]) {
    for (a, b) in acc.iter_mut().zip(per_scale) {
        a.evaluations += b.evaluations;
        a.activations += b.activations;
        a.zero_pushes += b.zero_pushes;
        a.deposits += b.deposits;
        a.dropped += b.dropped;
    }
}

pub fn cmd_simulate(global: &GlobalOpts, args: &SimulateArgs) -> Result<()> {
    let mut cfg = resolve_config(global, args.preset, MillConfig::elementary_reference())?;
    if args.desk {
        cfg = cfg.desk_scale();
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    create_out_dir(&args.out)?;

    let specs = scale_specs(&cfg);
    let mut per_scale = vec![ScaleStats::default(); specs.len()];
    let mut manifest = ManifestBuilder::new(&args.out);
    let mut names = Vec::with_capacity(cfg.n_series);
    for chunk_start in (0..cfg.n_series).step_by(CHUNK) {
        let hi = (chunk_start + CHUNK).min(cfg.n_series);
        let sims = (chunk_start..hi)
            .into_par_iter()
            .map(|i| simulate_composite_traced(&cfg, i as u64))
            .collect::<market_mill::Result<Vec<_>>>()?;
        for (offset, (series, trace)) in sims.iter().enumerate() {
            let i = chunk_start + offset;
            let name = match args.format {
                SeriesFormat::Binary => format!("series_{i:04}.mmill"),
                SeriesFormat::Csv => format!("series_{i:04}.csv"),
                SeriesFormat::CsvPrices => format!("prices_{i:04}.csv"),
            };
            let path = args.out.join(&name);
            match args.format {
                SeriesFormat::Binary => write_series_binary(&path, series)?,
                SeriesFormat::Csv => write_series_csv(&path, series)?,
                SeriesFormat::CsvPrices => write_price_path_csv(&path, series)?,
            }
            manifest.record(&name)?;
            names.push(name);
            add_stats(&mut per_scale, &trace.per_scale);
        }
    }

    let mut summary = render_summary(&cfg);
    summary.push('\n');
    summary.push_str(&format!("series files: {}\n", names.len()));
    let deposits: u64 = per_scale.iter().map(|s| s.deposits).sum();
    let dropped: u64 = per_scale.iter().map(|s| s.dropped).sum();
    summary.push_str(&format!("responses deposited: {deposits}\n"));
    let total = deposits + dropped;
    if total > 0 {
        summary.push_str(&format!(
            "responses dropped past series end: {dropped} ({})\n",
            fmt_num(dropped as f64 / total as f64)
        ));
    }
    let summary_path = args.out.join("summary.txt");
    fs::write(&summary_path, summary).map_err(|e| io_err(&summary_path, e))?;
    manifest.record("summary.txt")?;
    manifest.write("simulate", Some(&cfg))?;
    println!(
        "wrote {} series ({} increments each) to {}",
        cfg.n_series,
        cfg.series_len,
        args.out.display()
    );
    Ok(())
}

pub fn cmd_millness(args: &MillnessArgs) -> Result<()> {
    let (series, manifest_groups) = read_input(&args.input)?;
    let groups = args.groups.or(manifest_groups).unwrap_or(1);
    let dt0 = series[0].dt_minutes();
    let ks = args
        .dt
        .iter()
        .map(|&dt| {
            let k = dt / dt0;
            let rounded = k.round();
            if rounded >= 1.0 && (k - rounded).abs() < 1e-9 {
                Ok(rounded as usize)
            } else {
                Err(CliError::Config(format!(
                    "--dt {dt} is not a positive multiple of the stored dt0 = {dt0} min"
                )))
            }
        })
        .collect::<Result<Vec<usize>>>()?;
    let reports = ks
        .iter()
        .map(|&k| {
            millness_report_for_series(&series, groups, k, args.delta_p_star)
                .map_err(CliError::from)
        })
        .collect::<Result<Vec<MillnessReport>>>()?;
    print!("{}", render_millness_table(&args.source, &reports));
    if let Some(out) = &args.out {
        create_out_dir(out)?;
        write_millness_csv(&out.join("millness.csv"), &args.source, &reports)?;
        let mut manifest = ManifestBuilder::new(out);
        manifest.record("millness.csv")?;
        manifest.write("millness", None)?;
    }
    Ok(())
}

fn write_pattern_outputs(
    out: &Path,
    manifest: &mut ManifestBuilder,
    pattern: &AsymmetryPattern,
    image: bool,
) -> Result<Vec<String>> {
    let axis = pattern.axis().name();
    let mut names = Vec::new();
    for kind in [GridKind::Asym, GridKind::MillComponent] {
        let name = format!("pattern_{axis}_{}.csv", kind.suffix());
        write_grid_csv(&out.join(&name), pattern, kind)?;
        manifest.record(&name)?;
        names.push(name);
        if image {
            let name = format!("pattern_{axis}_{}.ppm", kind.suffix());
            write_grid_ppm(&out.join(&name), pattern, kind)?;
            manifest.record(&name)?;
            names.push(name);
        }
    }
    Ok(names)
}

pub fn cmd_pattern(args: &PatternArgs) -> Result<()> {
    let (series, _) = read_input(&args.input)?;
    let mut h = BivariateHistogram::new(args.bin, args.extent)?;
    for s in &series {
        h.accumulate(&make_pairs(s)?);
    }
    let pattern = asymmetric_component(&h, args.axis.into())?;
    create_out_dir(&args.out)?;
    let mut manifest = ManifestBuilder::new(&args.out);
    let names = write_pattern_outputs(&args.out, &mut manifest, &pattern, args.image)?;
    manifest.write("pattern", None)?;
    println!(
        "binned {} of {} pairs on the {} grid; wrote {}",
        h.n_in(),
        h.n_total(),
        pattern.axis().name(),
        names.join(", ")
    );
    Ok(())
}

/// Share of the positive asymmetric mass, within the square |x|,|y| <=
/// window, lying in bins whose center satisfies the predicate.
fn positive_mass_share(
    p: &AsymmetryPattern,
    window: f64,
    pred: impl Fn(f64, f64) -> bool,
) -> f64 {
    let n = p.n_axis();
    let (mut hit, mut total) = (0.0, 0.0);
    for iy in 0..n {
        for ix in 0..n {
            let (x, y) = (p.center(ix), p.center(iy));
            if x.abs() > window || y.abs() > window {
                continue;
            }
            let m = p.mill_component(ix, iy);
            if m <= 0.0 {
                continue;
            }
            total += m;
            if pred(x, y) {
                hit += m;
            }
        }
    }
    if total > 0.0 {
        hit / total
    } else {
        0.0
    }
}

pub fn cmd_portrait(global: &GlobalOpts, args: &PortraitArgs) -> Result<()> {
    let mix = match (args.preset, &args.weights) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config("give either --preset or --weights, not both".into()));
        }
        (None, None) => {
            return Err(CliError::Config(
                "choose a portrait: --preset dis-like|hdi-like|de-like or --weights m,c,t".into(),
            ));
        }
        (Some(p), None) => p.mix(),
        (None, Some(ws)) => {
            let [m, c, t] = ws[..] else {
                return Err(CliError::Config(format!(
                    "--weights takes exactly three comma-separated values (mill,contrarian,trend), got {}",
                    ws.len()
                )));
            };
            StrategyMix::new(m, c, t)?
        }
    };
    let mut cfg = resolve_config(global, None, MillConfig::elementary_reference().desk_scale())?;
    cfg.strategy_weights = mix;
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    BivariateHistogram::new(args.bin, args.extent)?;

    let (bin, extent) = (args.bin, args.extent);
    let h = map_reduce_series(
        &cfg,
        |_, s: &IncrementSeries| {
            let pairs = make_pairs(s).expect("simulated series pair up");
            BivariateHistogram::from_pairs(&pairs, bin, extent).expect("grid validated above")
        },
        |mut a, b| {
            a.merge(&b).expect("identical grids");
            a
        },
    )?;
    let pattern = asymmetric_component(&h, AsymmetryAxis::X0)?;

    create_out_dir(&args.out)?;
    let mut manifest = ManifestBuilder::new(&args.out);
    let names = write_pattern_outputs(&args.out, &mut manifest, &pattern, args.image)?;

    let window = 3.0 * cfg.base_scale();
    let correlated = positive_mass_share(&pattern, window, |x, y| x * y > 0.0);
    let anticorrelated = positive_mass_share(&pattern, window, |x, y| x * y < 0.0);
    let alternating = positive_mass_share(&pattern, window, |x, y| sector_of(x, y).is_even());
    let mut summary = render_summary(&cfg);
    summary.push_str(&format!(
        "\npositive asymmetric mass within |x|,|y| <= {} (x0 axis):\n\
         correlated quadrants (trend signature): {}\n\
         anticorrelated quadrants (contrarian signature): {}\n\
         alternating wedges (mill signature): {}\n",
        fmt_num(window),
        fmt_num(correlated),
        fmt_num(anticorrelated),
        fmt_num(alternating),
    ));
    let summary_path = args.out.join("summary.txt");
    fs::write(&summary_path, summary).map_err(|e| io_err(&summary_path, e))?;
    manifest.record("summary.txt")?;
    manifest.write("portrait", Some(&cfg))?;
    println!(
        "weights mill={} contrarian={} trend={}: correlated {:.3}, anticorrelated {:.3}, \
         alternating {:.3}; wrote {}",
        fmt_num(mix.w_mill()),
        fmt_num(mix.w_contrarian()),
        fmt_num(mix.w_trend()),
        correlated,
        anticorrelated,
        alternating,
        names.join(", ")
    );
    Ok(())
}

pub fn cmd_ingest(args: &IngestArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input).map_err(|e| io_err(&args.input, e))?;
    let ticks = parse_ticks(&text, &args.input)?;
    let session = parse_session(&args.session)?;
    let segments = resample(&ticks, args.dt0_minutes, session)?;
    create_out_dir(&args.out)?;
    let mut manifest = ManifestBuilder::new(&args.out);
    let mut summary = format!(
        "ticks: {}\ndt0_minutes: {}\nsession: {}\nsegments: {}\n",
        ticks.len(),
        fmt_num(args.dt0_minutes),
        args.session,
        segments.len()
    );
    for (i, seg) in segments.iter().enumerate() {
        let name = match args.format {
            StoreFormat::Binary => format!("segment_{i:04}.mmill"),
            StoreFormat::Csv => format!("segment_{i:04}.csv"),
        };
        let path = args.out.join(&name);
        match args.format {
            StoreFormat::Binary => write_series_binary(&path, seg)?,
            StoreFormat::Csv => write_series_csv(&path, seg)?,
        }
        manifest.record(&name)?;
        summary.push_str(&format!("{name}: {} increments\n", seg.increments().len()));
    }
    let summary_path = args.out.join("summary.txt");
    fs::write(&summary_path, summary).map_err(|e| io_err(&summary_path, e))?;
    manifest.record("summary.txt")?;
    manifest.write("ingest", None)?;
    let total: usize = segments.iter().map(|s| s.increments().len()).sum();
    println!(
        "resampled {} ticks into {} segment(s), {} increments total, in {}",
        ticks.len(),
        segments.len(),
        total,
        args.out.display()
    );
    Ok(())
}

impl PresetArg {
    fn config(self) -> MillConfig {
        match self {
            PresetArg::Elementary => MillConfig::elementary_reference(),
            PresetArg::Composite => MillConfig::composite_reference(),
            PresetArg::Noise => MillConfig { nu0: 0.0, ..MillConfig::elementary_reference() },
        }
    }
}

impl From<AxisArg> for AsymmetryAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::X0 => AsymmetryAxis::X0,
            AxisArg::Y0 => AsymmetryAxis::Y0,
            AxisArg::Diag => AsymmetryAxis::Diag,
            AxisArg::Antidiag => AsymmetryAxis::AntiDiag,
        }
    }
}
