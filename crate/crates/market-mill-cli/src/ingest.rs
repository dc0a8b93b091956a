//! Tick CSV ingestion: `timestamp,price` rows resampled to last price per
//! dt0 interval, forward-filled between trades, split into one segment per
//! session so no increment pair straddles a session break. The inverse
//! export writes a synthetic price path that re-ingests to the same
//! increments.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Duration, NaiveDate, NaiveDateTime, NaiveTime, SecondsFormat, TimeZone, Utc};
use market_mill::IncrementSeries;

use crate::error::{io_err, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    /// Wall-clock time as written in the file (offset dropped, not shifted);
    /// session windows are wall-clock windows.
    pub wall: NaiveDateTime,
    pub price: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionWindow {
    All,
    Daily { open: NaiveTime, close: NaiveTime },
}

/// "all", or "HH:MM-HH:MM" for a daily window; overnight windows are
/// rejected.
pub fn parse_session(s: &str) -> Result<SessionWindow> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(SessionWindow::All);
    }
    let parts: Option<(NaiveTime, NaiveTime)> = s.split_once('-').and_then(|(o, c)| {
        let open = NaiveTime::parse_from_str(o.trim(), "%H:%M").ok()?;
        let close = NaiveTime::parse_from_str(c.trim(), "%H:%M").ok()?;
        Some((open, close))
    });
    let Some((open, close)) = parts else {
        return Err(CliError::Config(format!(
            "session must be 'all' or 'HH:MM-HH:MM', got '{s}'"
        )));
    };
    if open >= close {
        return Err(CliError::Config(format!(
            "session open {open} must precede close {close} (overnight sessions unsupported)"
        )));
    }
    Ok(SessionWindow::Daily { open, close })
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.naive_local());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt);
        }
    }
    None
}

pub fn parse_ticks(text: &str, label: &Path) -> Result<Vec<Tick>> {
    let bad = |n: usize, msg: String| CliError::Io(format!("{}: line {n}: {msg}", label.display()));
    let mut ticks: Vec<Tick> = Vec::new();
    let mut saw_header = false;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            if !line.eq_ignore_ascii_case("timestamp,price") {
                return Err(bad(n, format!("expected header 'timestamp,price', got '{line}'")));
            }
            saw_header = true;
            continue;
        }
        let Some((ts, px)) = line.split_once(',') else {
            return Err(bad(n, format!("expected 'timestamp,price', got '{line}'")));
        };
        let wall = parse_timestamp(ts.trim())
            .ok_or_else(|| bad(n, format!("unparseable timestamp '{}'", ts.trim())))?;
        let price: f64 = px
            .trim()
            .parse()
            .map_err(|_| bad(n, format!("unparseable price '{}'", px.trim())))?;
        if !(price.is_finite() && price > 0.0) {
            return Err(bad(n, format!("price must be positive, got {price}")));
        }
        if let Some(prev) = ticks.last() {
            if wall < prev.wall {
                return Err(bad(n, "timestamps must be non-decreasing".into()));
            }
        }
        ticks.push(Tick { wall, price });
    }
    if ticks.is_empty() {
        return Err(CliError::Io(format!("{}: no data rows", label.display())));
    }
    Ok(ticks)
}

/// Grid prices over [origin, end] at step_ns spacing: at each grid time the
/// last tick price at or before it. Grid times before the first tick carry
/// no price and are skipped; ticks must be sorted.
fn segment_increments(
    ticks: &[Tick],
    origin: NaiveDateTime,
    end: NaiveDateTime,
    step_ns: i64,
    dt0_minutes: f64,
) -> Option<IncrementSeries> {
    let mut prices = Vec::new();
    let mut idx = 0;
    let mut last = None;
    let mut k: i64 = 0;
    loop {
        let t = origin + Duration::nanoseconds(step_ns * k);
        if t > end {
            break;
        }
        while idx < ticks.len() && ticks[idx].wall <= t {
            last = Some(ticks[idx].price);
            idx += 1;
        }
        if let Some(p) = last {
            prices.push(p);
        }
        k += 1;
    }
    if prices.len() < 2 {
        return None;
    }
    let inc: Vec<f64> = prices.windows(2).map(|w| w[1] - w[0]).collect();
    Some(IncrementSeries::new(dt0_minutes, inc).expect("finite prices difference finitely"))
}

/// One increment series per session. With a daily window the grid is
/// anchored at the session open and ticks outside the window are ignored;
/// with "all" the grid starts at the first tick. No segment extends past its
/// last trade.
pub fn resample(
    ticks: &[Tick],
    dt0_minutes: f64,
    session: SessionWindow,
) -> Result<Vec<IncrementSeries>> {
    if !(dt0_minutes.is_finite() && dt0_minutes > 0.0) {
        return Err(CliError::Config(format!(
            "dt0_minutes must be positive, got {dt0_minutes}"
        )));
    }
    let step_ns = (dt0_minutes * 60e9).round() as i64;
    if step_ns == 0 {
        return Err(CliError::Config("dt0_minutes is below nanosecond resolution".into()));
    }
    let mut segments = Vec::new();
    match session {
        SessionWindow::All => {
            let origin = ticks[0].wall;
            let end = ticks[ticks.len() - 1].wall;
            segments.extend(segment_increments(ticks, origin, end, step_ns, dt0_minutes));
        }
        SessionWindow::Daily { open, close } => {
            let mut dates: Vec<NaiveDate> = ticks.iter().map(|t| t.wall.date()).collect();
            dates.dedup();
            for date in dates {
                let open_dt = date.and_time(open);
                let close_dt = date.and_time(close);
                let day: Vec<Tick> = ticks
                    .iter()
                    .filter(|t| t.wall.date() == date && t.wall >= open_dt && t.wall <= close_dt)
                    .copied()
                    .collect();
                if let Some(last) = day.last() {
                    let end = close_dt.min(last.wall);
                    segments.extend(segment_increments(&day, open_dt, end, step_ns, dt0_minutes));
                }
            }
        }
    }
    if segments.is_empty() {
        return Err(CliError::Numeric(
            "resampling produced no increments; check dt0 and the session window".into(),
        ));
    }
    Ok(segments)
}

/// Inverse of ingestion: a synthetic price path starting at $50 on a fixed
/// base date, one tick per dt0 grid point. Prices use shortest-round-trip
/// formatting, so re-ingesting recovers the increments to float precision.
pub fn write_price_path_csv(path: &Path, series: &IncrementSeries) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    let io = |e| io_err(path, e);
    let step_ns = (series.dt_minutes() * 60e9).round() as i64;
    let start = Utc.with_ymd_and_hms(2004, 1, 2, 9, 30, 0).unwrap();
    writeln!(w, "timestamp,price").map_err(io)?;
    let mut price = 50.0f64;
    let mut t = start;
    writeln!(w, "{},{price}", t.to_rfc3339_opts(SecondsFormat::AutoSi, true)).map_err(io)?;
    for &inc in series.increments() {
        t += Duration::nanoseconds(step_ns);
        price += inc;
        writeln!(w, "{},{price}", t.to_rfc3339_opts(SecondsFormat::AutoSi, true)).map_err(io)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn label() -> PathBuf {
        PathBuf::from("ticks.csv")
    }

    fn ticks(rows: &str) -> Vec<Tick> {
        parse_ticks(&format!("timestamp,price\n{rows}"), &label()).unwrap()
    }

    #[test]
    fn two_ticks_one_minute_apart() {
        let t = ticks("2004-01-02T09:30:00Z,10.00\n2004-01-02T09:31:00Z,10.02\n");
        let seg = resample(&t, 1.0, SessionWindow::All).unwrap();
        assert_eq!(seg.len(), 1);
        let inc = seg[0].increments();
        assert_eq!(inc.len(), 1);
        assert!((inc[0] - 0.02).abs() < 1e-12);
    }

    #[test]
    fn gap_forward_fills_with_zeros() {
        let t = ticks("2004-01-02 09:30:00,10.00\n2004-01-02 09:34:00,10.05\n");
        let seg = resample(&t, 1.0, SessionWindow::All).unwrap();
        let inc = seg[0].increments();
        assert_eq!(inc.len(), 4);
        assert_eq!(&inc[..3], &[0.0, 0.0, 0.0]);
        assert!((inc[3] - 0.05).abs() < 1e-12);
    }

    #[test]
    fn sessions_split_days_and_drop_outside_ticks() {
        let rows = "\
2004-01-02T09:15:00Z,9.00\n\
2004-01-02T09:30:00Z,10.00\n\
2004-01-02T09:32:00Z,10.10\n\
2004-01-02T16:30:00Z,99.0\n\
2004-01-05T09:30:00Z,11.00\n\
2004-01-05T09:31:00Z,11.25\n";
        let t = ticks(rows);
        let session = parse_session("09:30-16:00").unwrap();
        let segs = resample(&t, 1.0, session).unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].increments().len(), 2);
        assert!((segs[0].increments()[0] - 0.0).abs() < 1e-12); // 09:31 forward-fill
        assert!((segs[0].increments()[1] - 0.10).abs() < 1e-12);
        assert_eq!(segs[1].increments().len(), 1);
        assert!((segs[1].increments()[0] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn timezone_offsets_are_wall_clock() {
        let t = ticks("2004-01-02T09:30:00-05:00,10.00\n2004-01-02T09:31:00-05:00,10.50\n");
        assert_eq!(t[0].wall, NaiveDate::from_ymd_opt(2004, 1, 2).unwrap().and_hms_opt(9, 30, 0).unwrap());
        let seg = resample(&t, 1.0, parse_session("09:30-16:00").unwrap()).unwrap();
        assert_eq!(seg[0].increments().len(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        for (text, needle) in [
            ("nope\n", "line 1: expected header"),
            ("timestamp,price\ngarbage\n", "line 2: expected 'timestamp,price'"),
            ("timestamp,price\nnot-a-date,10\n", "line 2: unparseable timestamp"),
            ("timestamp,price\n2004-01-02T09:30:00Z,zero\n", "line 2: unparseable price"),
            ("timestamp,price\n2004-01-02T09:30:00Z,-4\n", "line 2: price must be positive"),
            (
                "timestamp,price\n2004-01-02T09:31:00Z,10\n2004-01-02T09:30:00Z,10\n",
                "line 3: timestamps must be non-decreasing",
            ),
        ] {
            let err = parse_ticks(text, &label()).unwrap_err();
            assert!(err.to_string().contains(needle), "{err} missing {needle}");
            assert_eq!(err.exit_code(), 3);
        }
        assert_eq!(parse_ticks("timestamp,price\n", &label()).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn session_flag_parsing() {
        assert_eq!(parse_session("all").unwrap(), SessionWindow::All);
        assert!(matches!(parse_session("09:30-16:00").unwrap(), SessionWindow::Daily { .. }));
        for bad in ["9h-16h", "16:00-09:30", "09:30", ""] {
            assert_eq!(parse_session(bad).unwrap_err().exit_code(), 2);
        }
    }

    #[test]
    fn no_in_session_data_is_a_numeric_failure() {
        let t = ticks("2004-01-02T08:00:00Z,10.00\n2004-01-02T08:05:00Z,10.10\n");
        let err = resample(&t, 1.0, parse_session("09:30-16:00").unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn price_path_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("prices.csv");
        let series =
            IncrementSeries::new(1.0, vec![0.02, -0.013, 0.0, 1.0 / 3.0, -0.25]).unwrap();
        write_price_path_csv(&p, &series).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let t = parse_ticks(&text, &p).unwrap();
        assert_eq!(t.len(), 6);
        let segs = resample(&t, 1.0, SessionWindow::All).unwrap();
        assert_eq!(segs.len(), 1);
        let back = segs[0].increments();
        assert_eq!(back.len(), 5);
        for (a, b) in back.iter().zip(series.increments()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}
