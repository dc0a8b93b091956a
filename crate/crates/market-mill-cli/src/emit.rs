//! Text and image emitters: pattern grids as CSV (9 significant digits,
//! stable formatting, exact re-emission after a parse), millness tables, and
//! an optional PPM rendering of a grid.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use market_mill::{AsymmetryPattern, MillnessReport};

use crate::error::{io_err, Result};

/// Which field of an asymmetry pattern a grid holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Asym,
    MillComponent,
}

impl GridKind {
    pub fn suffix(&self) -> &'static str {
        match self {
            GridKind::Asym => "asym",
            GridKind::MillComponent => "mill",
        }
    }

    fn value(&self, p: &AsymmetryPattern, ix: usize, iy: usize) -> f64 {
        match self {
            GridKind::Asym => p.asym(ix, iy),
            GridKind::MillComponent => p.mill_component(ix, iy),
        }
    }
}

/// Nine significant digits; parsing the string back to f64 and re-formatting
/// reproduces it byte for byte.
pub fn fmt_grid_value(v: f64) -> String {
    format!("{v:.8e}")
}

/// Grid CSV: header `x_center,y_center,value`, rows in ascending y then
/// ascending x.
pub fn write_grid_csv(path: &Path, p: &AsymmetryPattern, kind: GridKind) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    let io = |e| io_err(path, e);
    writeln!(w, "x_center,y_center,value").map_err(io)?;
    let n = p.n_axis();
    for iy in 0..n {
        for ix in 0..n {
            writeln!(
                w,
                "{},{},{}",
                fmt_grid_value(p.center(ix)),
                fmt_grid_value(p.center(iy)),
                fmt_grid_value(kind.value(p, ix, iy)),
            )
            .map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Binary PPM (P6) render. Each bin becomes a square of pixels; positive
/// values shade red, negative blue, scaled to the grid's largest magnitude.
/// Rows are written top-down so positive y points up.
pub fn write_grid_ppm(path: &Path, p: &AsymmetryPattern, kind: GridKind) -> Result<()> {
    const PX: usize = 8;
    let n = p.n_axis();
    let vmax = (0..n * n)
        .map(|i| kind.value(p, i % n, i / n).abs())
        .fold(0.0f64, f64::max);
    let side = n * PX;
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    let io = |e| io_err(path, e);
    write!(w, "P6\n{side} {side}\n255\n").map_err(io)?;
    let mut row = vec![0u8; side * 3];
    for iy in (0..n).rev() {
        for ix in 0..n {
            let v = kind.value(p, ix, iy);
            let s = if vmax > 0.0 {
                ((v.abs() / vmax) * 255.0).round().min(255.0) as u8
            } else {
                0
            };
            let rgb = if v >= 0.0 {
                [255, 255 - s, 255 - s]
            } else {
                [255 - s, 255 - s, 255]
            };
            for px in 0..PX {
                row[(ix * PX + px) * 3..(ix * PX + px) * 3 + 3].copy_from_slice(&rgb);
            }
        }
        for _ in 0..PX {
            w.write_all(&row).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

fn fmt_dt(dt: f64) -> String {
    if dt == dt.trunc() {
        format!("{}", dt as i64)
    } else {
        format!("{dt}")
    }
}

/// Millness CSV: `source,quantity,dt_minutes,value_percent` with a mean row
/// and, when defined, a group standard deviation row per aggregation.
pub fn write_millness_csv(path: &Path, source: &str, reports: &[MillnessReport]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    let io = |e| io_err(path, e);
    writeln!(w, "source,quantity,dt_minutes,value_percent").map_err(io)?;
    for r in reports {
        writeln!(
            w,
            "{source},rho_mill_mean,{},{}",
            fmt_dt(r.dt_minutes),
            fmt_grid_value(r.mean)
        )
        .map_err(io)?;
        if let Some(sd) = r.std_dev {
            writeln!(
                w,
                "{source},rho_mill_std,{},{}",
                fmt_dt(r.dt_minutes),
                fmt_grid_value(sd)
            )
            .map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Human table, quantities as rows and aggregation intervals as columns.
pub fn render_millness_table(source: &str, reports: &[MillnessReport]) -> String {
    let mut head = format!("{:<12} {:<14}", "source", "quantity");
    for r in reports {
        head.push_str(&format!(" {:>10}", format!("dt={}", fmt_dt(r.dt_minutes))));
    }
    let mut mean = format!("{source:<12} {:<14}", "rho_mill_pct");
    let mut std = format!("{source:<12} {:<14}", "group_std_pct");
    let mut any_std = false;
    for r in reports {
        mean.push_str(&format!(" {:>10.4}", r.mean));
        match r.std_dev {
            Some(sd) => {
                any_std = true;
                std.push_str(&format!(" {:>10.4}", sd));
            }
            None => std.push_str(&format!(" {:>10}", "-")),
        }
    }
    let mut out = format!("{head}\n{mean}\n");
    if any_std {
        out.push_str(&std);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use market_mill::{asymmetric_component, AsymmetryAxis, BivariateHistogram, PairSet};
    use tempfile::tempdir;

    fn pattern() -> AsymmetryPattern {
        let pairs = PairSet::new(1.0, vec![(0.05, -0.02), (0.05, -0.02), (-0.05, -0.02)]);
        let h = BivariateHistogram::from_pairs(&pairs, 0.1, 0.3).unwrap();
        asymmetric_component(&h, AsymmetryAxis::X0).unwrap()
    }

    #[test]
    fn grid_csv_shape_and_reemission_stability() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("g.csv");
        write_grid_csv(&p, &pattern(), GridKind::Asym).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x_center,y_center,value"));
        let mut rebuilt = String::from("x_center,y_center,value\n");
        let mut rows = 0;
        for line in lines {
            let vals: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            assert_eq!(vals.len(), 3);
            rebuilt.push_str(&format!(
                "{},{},{}\n",
                fmt_grid_value(vals[0]),
                fmt_grid_value(vals[1]),
                fmt_grid_value(vals[2])
            ));
            rows += 1;
        }
        assert_eq!(rows, 36);
        assert_eq!(rebuilt, text);
    }

    #[test]
    fn ppm_header_and_size() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("g.ppm");
        write_grid_ppm(&p, &pattern(), GridKind::MillComponent).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert!(bytes.starts_with(b"P6\n48 48\n255\n"));
        assert_eq!(bytes.len(), b"P6\n48 48\n255\n".len() + 48 * 48 * 3);
    }

    #[test]
    fn millness_csv_and_table() {
        let r = MillnessReport {
            dt_minutes: 3.0,
            aggregation: 3,
            delta_p_star: 0.3,
            group_rho: vec![1.0, 2.0],
            mean: 1.5,
            std_dev: Some(0.3625),
            n_pairs: 100,
        };
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.csv");
        write_millness_csv(&p, "simulated", std::slice::from_ref(&r)).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("source,quantity,dt_minutes,value_percent\n"));
        assert!(text.contains("simulated,rho_mill_mean,3,1.50000000e0"));
        assert!(text.contains("simulated,rho_mill_std,3,3.62500000e-1"));

        let table = render_millness_table("simulated", &[r]);
        assert!(table.contains("dt=3"));
        assert!(table.contains("rho_mill_pct"));
        assert!(table.contains("1.5000"));

        let single = MillnessReport {
            dt_minutes: 1.0,
            aggregation: 1,
            delta_p_star: 0.3,
            group_rho: vec![1.0],
            mean: 1.0,
            std_dev: None,
            n_pairs: 10,
        };
        let table = render_millness_table("x", &[single]);
        assert!(!table.contains("group_std_pct"));
    }
}
