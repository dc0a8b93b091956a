//! Flat key = value run configuration. Keys carry their units; unknown or
//! duplicate keys and malformed values are reported with their line number.
//! Omitted keys keep the single-scale reference defaults.

use std::collections::BTreeSet;
use std::str::FromStr;

use market_mill::{scale_specs, MillConfig, StrategyMix};

use crate::error::{CliError, Result};

pub const KEYS: [&str; 14] = [
    "sigma0_dollars",
    "sigma0_is_std_dev",
    "nu0",
    "delay_scale_intervals",
    "n_scales",
    "scale_decay",
    "series_len",
    "n_series",
    "n_groups",
    "seed",
    "w_mill",
    "w_contrarian",
    "w_trend",
    "dt0_minutes",
];

fn parse<T: FromStr>(line_no: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        CliError::Config(format!(
            "line {line_no}: cannot parse {key} value '{value}'"
        ))
    })
}

pub fn parse_config_text(text: &str) -> Result<MillConfig> {
    let mut cfg = MillConfig::elementary_reference();
    let (mut w_mill, mut w_contrarian, mut w_trend) = (
        cfg.strategy_weights.w_mill(),
        cfg.strategy_weights.w_contrarian(),
        cfg.strategy_weights.w_trend(),
    );
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "line {n}: expected 'key = value', got '{line}'"
            )));
        };
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_owned()) {
            return Err(CliError::Config(format!("line {n}: duplicate key '{key}'")));
        }
        match key {
            "sigma0_dollars" => cfg.sigma0 = parse(n, key, value)?,
            "sigma0_is_std_dev" => cfg.sigma0_is_std_dev = parse(n, key, value)?,
            "nu0" => cfg.nu0 = parse(n, key, value)?,
            "delay_scale_intervals" => cfg.l_scale = parse(n, key, value)?,
            "n_scales" => cfg.n_scales = parse(n, key, value)?,
            "scale_decay" => cfg.scale_decay = parse(n, key, value)?,
            "series_len" => cfg.series_len = parse(n, key, value)?,
            "n_series" => cfg.n_series = parse(n, key, value)?,
            "n_groups" => cfg.n_groups = parse(n, key, value)?,
            "seed" => cfg.seed = parse(n, key, value)?,
            "w_mill" => w_mill = parse(n, key, value)?,
            "w_contrarian" => w_contrarian = parse(n, key, value)?,
            "w_trend" => w_trend = parse(n, key, value)?,
            "dt0_minutes" => cfg.dt0_minutes = parse(n, key, value)?,
            _ => {
                return Err(CliError::Config(format!(
                    "line {n}: unknown key '{key}' (known keys: {})",
                    KEYS.join(", ")
                )));
            }
        }
    }
    cfg.strategy_weights = StrategyMix::new(w_mill, w_contrarian, w_trend)
        .map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

/// Formats a float compactly: fixed six decimals with trailing zeros
/// trimmed, so 0.096000... echoes as 0.096.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.into()
    }
}

/// Config echo in the same key = value syntax the parser accepts.
pub fn render_config(cfg: &MillConfig) -> String {
    format!(
        "sigma0_dollars = {}\n\
         sigma0_is_std_dev = {}\n\
         nu0 = {}\n\
         delay_scale_intervals = {}\n\
         n_scales = {}\n\
         scale_decay = {}\n\
         series_len = {}\n\
         n_series = {}\n\
         n_groups = {}\n\
         seed = {}\n\
         w_mill = {}\n\
         w_contrarian = {}\n\
         w_trend = {}\n\
         dt0_minutes = {}\n",
        fmt_num(cfg.sigma0),
        cfg.sigma0_is_std_dev,
        fmt_num(cfg.nu0),
        fmt_num(cfg.l_scale),
        cfg.n_scales,
        fmt_num(cfg.scale_decay),
        cfg.series_len,
        cfg.n_series,
        cfg.n_groups,
        cfg.seed,
        fmt_num(cfg.strategy_weights.w_mill()),
        fmt_num(cfg.strategy_weights.w_contrarian()),
        fmt_num(cfg.strategy_weights.w_trend()),
        fmt_num(cfg.dt0_minutes),
    )
}

/// Human summary: the config echo plus the derived cascade table.
pub fn render_summary(cfg: &MillConfig) -> String {
    let specs = scale_specs(cfg);
    let mut s = render_config(cfg);
    s.push('\n');
    s.push_str(&format!(
        "active scales: {} of {} configured\n",
        specs.len(),
        cfg.n_scales
    ));
    if specs.is_empty() {
        s.push_str("nu sequence: (none; pure noise)\n");
    } else {
        let nus: Vec<String> = specs.iter().map(|sc| fmt_num(sc.nu)).collect();
        s.push_str(&format!("nu sequence: {}\n", nus.join(", ")));
        s.push_str("scale  nu        delay_scale  response_sigma\n");
        for sc in &specs {
            s.push_str(&format!(
                "{:<5}  {:<8}  {:<11}  {}\n",
                sc.index,
                fmt_num(sc.nu),
                fmt_num(sc.delay.l_scale()),
                fmt_num(sc.response.sigma()),
            ));
        }
    }
    s
}
