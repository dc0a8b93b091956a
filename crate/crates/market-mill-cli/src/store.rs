//! Series files. The binary format is little-endian and length-prefixed:
//! magic "MMILL1", f64 dt_minutes, u64 count, then the increments. The CSV
//! form is one increment per line with dt_minutes in a comment header,
//! formatted for exact f64 round-trips.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use market_mill::IncrementSeries;

use crate::error::{io_err, CliError, Result};
use crate::manifest::read_manifest_groups;

pub const MAGIC: &[u8; 6] = b"MMILL1";

pub fn write_series_binary(path: &Path, series: &IncrementSeries) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    let io = |e| io_err(path, e);
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&series.dt_minutes().to_le_bytes()).map_err(io)?;
    w.write_all(&(series.increments().len() as u64).to_le_bytes()).map_err(io)?;
    for v in series.increments() {
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_series_binary(path: &Path) -> Result<IncrementSeries> {
    let mut r = BufReader::new(File::open(path).map_err(|e| io_err(path, e))?);
    let io = |e| io_err(path, e);
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(CliError::Io(format!(
            "{}: bad magic, not a series file",
            path.display()
        )));
    }
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf).map_err(io)?;
    let dt = f64::from_le_bytes(buf);
    r.read_exact(&mut buf).map_err(io)?;
    let n = u64::from_le_bytes(buf) as usize;
    let mut inc = Vec::with_capacity(n);
    for _ in 0..n {
        r.read_exact(&mut buf).map_err(io)?;
        inc.push(f64::from_le_bytes(buf));
    }
    if r.read(&mut buf).map_err(io)? != 0 {
        return Err(CliError::Io(format!(
            "{}: trailing bytes after {n} increments",
            path.display()
        )));
    }
    IncrementSeries::new(dt, inc).map_err(|e| io_err(path, e))
}

pub fn write_series_csv(path: &Path, series: &IncrementSeries) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    let io = |e| io_err(path, e);
    writeln!(w, "# dt_minutes = {}", series.dt_minutes()).map_err(io)?;
    writeln!(w, "increment_dollars").map_err(io)?;
    for v in series.increments() {
        writeln!(w, "{v}").map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_series_csv(path: &Path) -> Result<IncrementSeries> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut dt = None;
    let mut inc = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                if k.trim() == "dt_minutes" {
                    dt = Some(v.trim().parse::<f64>().map_err(|_| {
                        CliError::Io(format!("{}: line {n}: bad dt_minutes", path.display()))
                    })?);
                }
            }
            continue;
        }
        if line == "increment_dollars" {
            continue;
        }
        inc.push(line.parse::<f64>().map_err(|_| {
            CliError::Io(format!(
                "{}: line {n}: cannot parse increment '{line}'",
                path.display()
            ))
        })?);
    }
    let dt = dt.ok_or_else(|| {
        CliError::Io(format!("{}: missing '# dt_minutes = ...' header", path.display()))
    })?;
    IncrementSeries::new(dt, inc).map_err(|e| io_err(path, e))
}

pub fn read_series_auto(path: &Path) -> Result<IncrementSeries> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("mmill") => read_series_binary(path),
        Some("csv") => read_series_csv(path),
        _ => Err(CliError::Io(format!(
            "{}: unrecognized series extension (expected .mmill or .csv)",
            path.display()
        ))),
    }
}

fn is_series_file(path: &Path) -> bool {
    let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
        return false;
    };
    name.ends_with(".mmill")
        || ((name.starts_with("series_") || name.starts_with("segment_"))
            && name.ends_with(".csv"))
}

/// Reads a batch: either one series file or a directory of them (sorted by
/// file name). A manifest.json alongside supplies the group count.
pub fn read_input(path: &Path) -> Result<(Vec<IncrementSeries>, Option<usize>)> {
    let meta = fs::metadata(path).map_err(|e| io_err(path, e))?;
    if meta.is_file() {
        return Ok((vec![read_series_auto(path)?], None));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| io_err(path, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| is_series_file(p))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Io(format!(
            "{}: no series files (*.mmill, series_*.csv, segment_*.csv)",
            path.display()
        )));
    }
    let series = files.iter().map(|p| read_series_auto(p)).collect::<Result<Vec<_>>>()?;
    Ok((series, read_manifest_groups(&path.join("manifest.json"))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn sample() -> IncrementSeries {
        IncrementSeries::new(3.0, vec![0.01, -0.25, 0.0, 1.0 / 3.0]).unwrap()
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("s.mmill");
        write_series_binary(&p, &sample()).unwrap();
        let back = read_series_binary(&p).unwrap();
        assert_eq!(back.dt_minutes(), 3.0);
        assert_eq!(back.increments(), sample().increments());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("series_0000.csv");
        write_series_csv(&p, &sample()).unwrap();
        let back = read_series_csv(&p).unwrap();
        assert_eq!(back.dt_minutes(), 3.0);
        assert_eq!(back.increments(), sample().increments());
    }

    #[test]
    fn rejects_corrupt_binary() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("s.mmill");
        std::fs::write(&p, b"NOTMAGIC").unwrap();
        let err = read_series_binary(&p).unwrap_err();
        assert_eq!(err.exit_code(), 3);

        write_series_binary(&p, &sample()).unwrap();
        let mut bytes = std::fs::read(&p).unwrap();
        bytes.push(0);
        std::fs::write(&p, &bytes).unwrap();
        assert_eq!(read_series_binary(&p).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn reads_directory_sorted() {
        let dir = tempdir().unwrap();
        let a = IncrementSeries::new(1.0, vec![1.0]).unwrap();
        let b = IncrementSeries::new(1.0, vec![2.0]).unwrap();
        write_series_binary(&dir.path().join("series_0001.mmill"), &b).unwrap();
        write_series_binary(&dir.path().join("series_0000.mmill"), &a).unwrap();
        std::fs::write(dir.path().join("summary.txt"), "notes").unwrap();
        let (series, groups) = read_input(dir.path()).unwrap();
        assert_eq!(series.len(), 2);
        assert_eq!(series[0].increments(), &[1.0]);
        assert_eq!(series[1].increments(), &[2.0]);
        assert_eq!(groups, None);
    }

    #[test]
    fn empty_directory_is_io_error() {
        let dir = tempdir().unwrap();
        assert_eq!(read_input(dir.path()).unwrap_err().exit_code(), 3);
        assert_eq!(
            read_input(&dir.path().join("missing")).unwrap_err().exit_code(),
            3
        );
    }
}
