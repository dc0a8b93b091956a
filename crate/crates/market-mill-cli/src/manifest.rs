//! Run manifest: every file a command emits, with its sha256, plus the
//! config that produced it. The manifest itself is written last, so a
//! manifest on disk always describes completed outputs.

use std::fs::{self, File};
use std::io::Read;
use std::path::{Path, PathBuf};

use market_mill::{MillConfig, StrategyMix};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, Result};

/// MillConfig mirrored with the config-file key names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub sigma0_dollars: f64,
    pub sigma0_is_std_dev: bool,
    pub nu0: f64,
    pub delay_scale_intervals: f64,
    pub n_scales: usize,
    pub scale_decay: f64,
    pub series_len: usize,
    pub n_series: usize,
    pub n_groups: usize,
    pub seed: u64,
    pub w_mill: f64,
    pub w_contrarian: f64,
    pub w_trend: f64,
    pub dt0_minutes: f64,
}

impl From<&MillConfig> for ConfigEcho {
    fn from(c: &MillConfig) -> Self {
        Self {
            sigma0_dollars: c.sigma0,
            sigma0_is_std_dev: c.sigma0_is_std_dev,
            nu0: c.nu0,
            delay_scale_intervals: c.l_scale,
            n_scales: c.n_scales,
            scale_decay: c.scale_decay,
            series_len: c.series_len,
            n_series: c.n_series,
            n_groups: c.n_groups,
            seed: c.seed,
            w_mill: c.strategy_weights.w_mill(),
            w_contrarian: c.strategy_weights.w_contrarian(),
            w_trend: c.strategy_weights.w_trend(),
            dt0_minutes: c.dt0_minutes,
        }
    }
}

impl ConfigEcho {
    #[allow(dead_code)]
    pub fn to_config(&self) -> Result<MillConfig> {
        let cfg = MillConfig {
            sigma0: self.sigma0_dollars,
            sigma0_is_std_dev: self.sigma0_is_std_dev,
            nu0: self.nu0,
            l_scale: self.delay_scale_intervals,
            n_scales: self.n_scales,
            scale_decay: self.scale_decay,
            series_len: self.series_len,
            n_series: self.n_series,
            n_groups: self.n_groups,
            seed: self.seed,
            strategy_weights: StrategyMix::new(self.w_mill, self.w_contrarian, self.w_trend)
                .map_err(|e| CliError::Config(e.to_string()))?,
            dt0_minutes: self.dt0_minutes,
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub produced_at: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigEcho>,
    pub outputs: Vec<OutputEntry>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    use sha2::{Digest, Sha256};
    let mut f = File::open(path).map_err(|e| io_err(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 65536];
    loop {
        let n = f.read(&mut buf).map_err(|e| io_err(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Collects emitted files, then writes manifest.json as the final artifact.
pub struct ManifestBuilder {
    dir: PathBuf,
    outputs: Vec<OutputEntry>,
}

impl ManifestBuilder {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), outputs: Vec::new() }
    }

    /// Hashes an already-written file, named relative to the output dir.
    pub fn record(&mut self, rel: &str) -> Result<()> {
        let sha256 = sha256_file(&self.dir.join(rel))?;
        self.outputs.push(OutputEntry { path: rel.to_owned(), sha256 });
        Ok(())
    }

    pub fn write(self, command: &str, config: Option<&MillConfig>) -> Result<()> {
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            produced_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            command: command.to_owned(),
            config: config.map(ConfigEcho::from),
            outputs: self.outputs,
        };
        let path = self.dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Io(format!("manifest: {e}")))?;
        fs::write(&path, json + "\n").map_err(|e| io_err(&path, e))
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

/// Group count recorded in a batch dir's manifest, if one is readable.
pub fn read_manifest_groups(path: &Path) -> Option<usize> {
    read_manifest(path).ok().and_then(|m| m.config.map(|c| c.n_groups))
}
