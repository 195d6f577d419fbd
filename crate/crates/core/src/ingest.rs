//! Tick ingestion: session calendar, trading-day assignment and resampling
//! onto an equally spaced intraday log-price grid.
//!
//! The exchange day runs from `session_start` on the previous calendar day to
//! `session_end` on the trading day itself (17:00 to 16:00 by default). Ticks in
//! the hour between sessions are discarded, as are ticks whose trading day is
//! excluded by the calendar.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Datelike, Duration, NaiveDate, NaiveDateTime, NaiveTime, Weekday};
use chrono_tz::Tz;
use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpillError};

/// A single trade: exchange-local timestamp and price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    pub ts: NaiveDateTime,
    pub price: f64,
}

/// Raw trades for one asset, sorted by time, one trade per timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct TickSeries {
    asset_id: String,
    records: Vec<Tick>,
}

impl TickSeries {
    /// Builds a series from unordered records.
    ///
    /// Records are stably sorted by timestamp; when several trades share a
    /// timestamp the last one in input order is kept.
    pub fn new(asset_id: impl Into<String>, mut records: Vec<Tick>) -> Result<Self> {
        if let Some(bad) = records
            .iter()
            .find(|t| !(t.price.is_finite() && t.price > 0.0))
        {
            return Err(SpillError::Data(format!(
                "non-positive or non-finite price {} at {}",
                bad.price, bad.ts
            )));
        }
        records.sort_by_key(|t| t.ts);
        let mut deduped: Vec<Tick> = Vec::with_capacity(records.len());
        for tick in records {
            match deduped.last_mut() {
                Some(last) if last.ts == tick.ts => *last = tick,
                _ => deduped.push(tick),
            }
        }
        Ok(Self {
            asset_id: asset_id.into(),
            records: deduped,
        })
    }

    pub fn asset_id(&self) -> &str {
        &self.asset_id
    }

    pub fn records(&self) -> &[Tick] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Ticks with `from <= ts <= to`.
    pub fn between(&self, from: NaiveDateTime, to: NaiveDateTime) -> &[Tick] {
        let lo = self.records.partition_point(|t| t.ts < from);
        let hi = self.records.partition_point(|t| t.ts <= to);
        &self.records[lo..hi.max(lo)]
    }
}

/// Trading session and excluded days.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionCalendar {
    pub session_start: NaiveTime,
    pub session_end: NaiveTime,
    pub excluded_dates: BTreeSet<NaiveDate>,
    pub exclude_weekends: bool,
    pub exclude_year_end: bool,
}

impl Default for SessionCalendar {
    fn default() -> Self {
        build_calendar(false, &[], false)
    }
}

/// Calendar with the 17:00–16:00 exchange session.
///
/// With `year_end_rule` set, December 24–26 and December 31–January 2 are
/// excluded in every year.
pub fn build_calendar(
    weekends: bool,
    holidays: &[NaiveDate],
    year_end_rule: bool,
) -> SessionCalendar {
    SessionCalendar {
        session_start: NaiveTime::from_hms_opt(17, 0, 0).unwrap(),
        session_end: NaiveTime::from_hms_opt(16, 0, 0).unwrap(),
        excluded_dates: holidays.iter().copied().collect(),
        exclude_weekends: weekends,
        exclude_year_end: year_end_rule,
    }
}

fn is_year_end(date: NaiveDate) -> bool {
    matches!(
        (date.month(), date.day()),
        (12, 24..=26) | (12, 31) | (1, 1..=2)
    )
}

impl SessionCalendar {
    pub fn with_session(mut self, start: NaiveTime, end: NaiveTime) -> Self {
        self.session_start = start;
        self.session_end = end;
        self
    }

    fn spans_midnight(&self) -> bool {
        self.session_start > self.session_end
    }

    pub fn is_excluded(&self, date: NaiveDate) -> bool {
        (self.exclude_weekends && matches!(date.weekday(), Weekday::Sat | Weekday::Sun))
            || (self.exclude_year_end && is_year_end(date))
            || self.excluded_dates.contains(&date)
    }

    /// Open and close instants of the session belonging to `day`. Both ends
    /// are part of the session.
    pub fn session_bounds(&self, day: NaiveDate) -> (NaiveDateTime, NaiveDateTime) {
        let close = day.and_time(self.session_end);
        let open = if self.spans_midnight() {
            (day - Duration::days(1)).and_time(self.session_start)
        } else {
            day.and_time(self.session_start)
        };
        (open, close)
    }

    pub fn session_length(&self) -> Duration {
        let (open, close) = self.session_bounds(NaiveDate::from_ymd_opt(2000, 1, 3).unwrap());
        close - open
    }
}

/// Result of mapping a timestamp onto the calendar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DayAssignment {
    Trading(NaiveDate),
    /// Falls between two sessions.
    OffSession,
    /// Belongs to a trading day the calendar excludes.
    ExcludedDay(NaiveDate),
}

impl DayAssignment {
    pub fn trading_day(self) -> Option<NaiveDate> {
        match self {
            DayAssignment::Trading(d) => Some(d),
            _ => None,
        }
    }
}

/// Maps a tick timestamp to its trading day.
///
/// For a session spanning midnight, ticks at or after `session_start` belong to
/// the next calendar day; ticks at or before `session_end` belong to the
/// current one.
pub fn assign_trading_day(ts: NaiveDateTime, cal: &SessionCalendar) -> DayAssignment {
    let date = ts.date();
    let time = ts.time();
    let day = if cal.spans_midnight() {
        if time >= cal.session_start {
            date.succ_opt().unwrap_or(date)
        } else if time <= cal.session_end {
            date
        } else {
            return DayAssignment::OffSession;
        }
    } else if time >= cal.session_start && time <= cal.session_end {
        date
    } else {
        return DayAssignment::OffSession;
    };
    if cal.is_excluded(day) {
        DayAssignment::ExcludedDay(day)
    } else {
        DayAssignment::Trading(day)
    }
}

/// Equally spaced intraday log prices `p_0..p_n` for one asset-day.
#[derive(Debug, Clone, PartialEq)]
pub struct IntradayGrid {
    pub asset_id: String,
    pub trading_day: NaiveDate,
    pub log_prices: Vec<f64>,
    pub grid_interval: Duration,
}

/// Previous-tick resampling of one trading day's session onto a grid.
///
/// Grid point `k` sits at `open + k * interval` and carries the log price of
/// the last trade at or before it; points before the first trade carry the
/// first trade's log price.
pub fn resample(
    ticks: &TickSeries,
    day: NaiveDate,
    cal: &SessionCalendar,
    interval: Duration,
) -> Result<IntradayGrid> {
    let (open, close) = cal.session_bounds(day);
    let session = close - open;
    if interval <= Duration::zero() {
        return Err(SpillError::InvalidArgument(
            "grid interval must be positive".into(),
        ));
    }
    let session_ms = session.num_milliseconds();
    let step_ms = interval.num_milliseconds();
    if step_ms == 0 || session_ms % step_ms != 0 {
        return Err(SpillError::InvalidArgument(format!(
            "interval of {step_ms} ms does not divide the session length of {session_ms} ms"
        )));
    }
    let n = (session_ms / step_ms) as usize;

    let in_session = ticks.between(open, close);
    let Some(first) = in_session.first() else {
        return Err(SpillError::DegenerateDay(format!(
            "{} has no ticks in the session of {day}",
            ticks.asset_id()
        )));
    };

    let mut log_prices = Vec::with_capacity(n + 1);
    let mut cursor = 0usize;
    let mut current = first.price.ln();
    for k in 0..=n {
        let at = open + interval * (k as i32);
        while cursor < in_session.len() && in_session[cursor].ts <= at {
            current = in_session[cursor].price.ln();
            cursor += 1;
        }
        log_prices.push(current);
    }

    Ok(IntradayGrid {
        asset_id: ticks.asset_id().to_string(),
        trading_day: day,
        log_prices,
        grid_interval: interval,
    })
}

/// Federal holidays observed in `year` (fixed-date holidays shift to Friday or
/// Monday when they fall on a weekend).
pub fn us_federal_holidays(year: i32) -> Vec<NaiveDate> {
    fn nth_weekday(year: i32, month: u32, weekday: Weekday, n: u8) -> NaiveDate {
        NaiveDate::from_weekday_of_month_opt(year, month, weekday, n).unwrap()
    }
    fn last_weekday(year: i32, month: u32, weekday: Weekday) -> NaiveDate {
        NaiveDate::from_weekday_of_month_opt(year, month, weekday, 5)
            .unwrap_or_else(|| nth_weekday(year, month, weekday, 4))
    }
    fn observed(date: NaiveDate) -> NaiveDate {
        match date.weekday() {
            Weekday::Sat => date - Duration::days(1),
            Weekday::Sun => date + Duration::days(1),
            _ => date,
        }
    }
    let fixed = |m, d| observed(NaiveDate::from_ymd_opt(year, m, d).unwrap());

    let mut days = vec![
        fixed(1, 1),
        nth_weekday(year, 1, Weekday::Mon, 3),
        nth_weekday(year, 2, Weekday::Mon, 3),
        last_weekday(year, 5, Weekday::Mon),
        fixed(7, 4),
        nth_weekday(year, 9, Weekday::Mon, 1),
        nth_weekday(year, 10, Weekday::Mon, 2),
        fixed(11, 11),
        nth_weekday(year, 11, Weekday::Thu, 4),
        fixed(12, 25),
    ];
    if year >= 2021 {
        days.push(fixed(6, 19));
    }
    days.sort();
    days
}

/// Parses an ISO-8601 timestamp. Timestamps carrying an offset are converted
/// into the exchange timezone; naive timestamps are taken as exchange-local.
pub fn parse_timestamp(raw: &str, tz: Tz) -> Option<NaiveDateTime> {
    let raw = raw.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.with_timezone(&tz).naive_local());
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S%.f%:z",
        "%Y-%m-%d %H:%M:%S%.f%:z",
        "%Y-%m-%d %H:%M:%S%.f%z",
    ] {
        if let Ok(dt) = DateTime::parse_from_str(raw, fmt) {
            return Some(dt.with_timezone(&tz).naive_local());
        }
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Some(dt);
        }
    }
    None
}

/// A row the tick reader could not use.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MalformedRow {
    pub line: usize,
    pub reason: String,
}

fn open_maybe_gzip(path: &Path) -> Result<Box<dyn BufRead>> {
    let io_err = |source| SpillError::Io {
        stage: "ingest",
        path: path.to_path_buf(),
        source,
    };
    let mut file = File::open(path).map_err(io_err)?;
    let mut magic = [0u8; 2];
    let read = file.read(&mut magic).map_err(io_err)?;
    let file = File::open(path).map_err(io_err)?;
    if read == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Reads a `timestamp,price` CSV (optionally gzip-compressed).
///
/// Malformed rows are skipped and returned with their 1-based line numbers.
pub fn read_tick_csv(
    path: &Path,
    asset_id: &str,
    tz: Tz,
) -> Result<(TickSeries, Vec<MalformedRow>)> {
    let reader = open_maybe_gzip(path)?;
    let mut records = Vec::new();
    let mut malformed = Vec::new();
    let mut saw_header = false;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|source| SpillError::Io {
            stage: "ingest",
            path: path.to_path_buf(),
            source,
        })?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            saw_header = true;
            let header: Vec<_> = line
                .split(',')
                .map(|s| s.trim().to_ascii_lowercase())
                .collect();
            if header == ["timestamp", "price"] {
                continue;
            }
            return Err(SpillError::Malformed {
                stage: "ingest",
                path: path.to_path_buf(),
                line: lineno,
                msg: format!("expected header `timestamp,price`, found `{line}`"),
            });
        }
        let mut fields = line.split(',');
        let (Some(ts_raw), Some(price_raw), None) = (fields.next(), fields.next(), fields.next())
        else {
            malformed.push(MalformedRow {
                line: lineno,
                reason: "expected 2 fields".into(),
            });
            continue;
        };
        let Some(ts) = parse_timestamp(ts_raw, tz) else {
            malformed.push(MalformedRow {
                line: lineno,
                reason: format!("bad timestamp `{ts_raw}`"),
            });
            continue;
        };
        match price_raw.trim().parse::<f64>() {
            Ok(price) if price.is_finite() && price > 0.0 => records.push(Tick { ts, price }),
            _ => malformed.push(MalformedRow {
                line: lineno,
                reason: format!("bad price `{price_raw}`"),
            }),
        }
    }
    Ok((TickSeries::new(asset_id, records)?, malformed))
}

/// Per-asset ingestion accounting.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AssetReport {
    pub asset_id: String,
    pub source: PathBuf,
    pub ticks_read: usize,
    pub malformed_rows: Vec<MalformedRow>,
    pub off_session_ticks: usize,
    pub excluded_day_ticks: usize,
    pub days_kept: usize,
    pub days_dropped: Vec<(NaiveDate, String)>,
}

/// Settings shared by every asset in one ingestion run.
#[derive(Debug, Clone)]
pub struct IngestSettings {
    pub calendar: SessionCalendar,
    pub interval: Duration,
    pub min_ticks: usize,
}

/// Splits a series into trading days and resamples each kept day.
///
/// Days with fewer than `min_ticks` in-session trades are dropped and listed
/// in the report.
pub fn ingest_series(
    series: &TickSeries,
    settings: &IngestSettings,
) -> Result<(Vec<IntradayGrid>, AssetReport)> {
    let mut report = AssetReport {
        asset_id: series.asset_id().to_string(),
        ticks_read: series.len(),
        ..Default::default()
    };
    let mut per_day: BTreeMap<NaiveDate, usize> = BTreeMap::new();
    for tick in series.records() {
        match assign_trading_day(tick.ts, &settings.calendar) {
            DayAssignment::Trading(d) => *per_day.entry(d).or_default() += 1,
            DayAssignment::OffSession => report.off_session_ticks += 1,
            DayAssignment::ExcludedDay(_) => report.excluded_day_ticks += 1,
        }
    }

    let mut grids = Vec::with_capacity(per_day.len());
    for (day, count) in per_day {
        if count < settings.min_ticks {
            log::info!("{}: dropping {day}, only {count} ticks", series.asset_id());
            report.days_dropped.push((
                day,
                format!("{count} ticks < minimum {}", settings.min_ticks),
            ));
            continue;
        }
        match resample(series, day, &settings.calendar, settings.interval) {
            Ok(grid) => grids.push(grid),
            Err(SpillError::DegenerateDay(msg)) => report.days_dropped.push((day, msg)),
            Err(e) => return Err(e),
        }
    }
    report.days_kept = grids.len();
    Ok((grids, report))
}

/// Writes a grid as `grid_index,log_price`.
pub fn write_grid_csv(grid: &IntradayGrid, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(grid.log_prices.len() * 24 + 20);
    out.push_str("grid_index,log_price\n");
    for (i, p) in grid.log_prices.iter().enumerate() {
        out.push_str(&format!("{i},{p}\n"));
    }
    std::fs::write(path, out).map_err(|source| SpillError::Io {
        stage: "ingest",
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a grid file written by [`write_grid_csv`].
pub fn read_grid_csv(
    path: &Path,
    asset_id: &str,
    day: NaiveDate,
    interval: Duration,
) -> Result<IntradayGrid> {
    let text = std::fs::read_to_string(path).map_err(|source| SpillError::Io {
        stage: "measures",
        path: path.to_path_buf(),
        source,
    })?;
    let malformed = |line: usize, msg: String| SpillError::Malformed {
        stage: "measures",
        path: PathBuf::from(path),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "grid_index,log_price" => {}
        _ => {
            return Err(malformed(
                1,
                "expected header `grid_index,log_price`".into(),
            ))
        }
    }
    let mut log_prices = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (i, p) = line
            .split_once(',')
            .ok_or_else(|| malformed(idx + 1, "expected 2 fields".into()))?;
        let i: usize = i
            .trim()
            .parse()
            .map_err(|_| malformed(idx + 1, format!("bad index `{i}`")))?;
        if i != log_prices.len() {
            return Err(malformed(idx + 1, format!("grid index {i} out of order")));
        }
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| malformed(idx + 1, format!("bad value `{p}`")))?;
        if !p.is_finite() {
            return Err(malformed(idx + 1, "non-finite log price".into()));
        }
        log_prices.push(p);
    }
    Ok(IntradayGrid {
        asset_id: asset_id.to_string(),
        trading_day: day,
        log_prices,
        grid_interval: interval,
    })
}
