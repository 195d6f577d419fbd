//! Run configuration (TOML).
//!
//! ```toml
//! output_dir = "out"
//! timezone = "America/Chicago"
//! interval_minutes = 5
//! min_ticks = 10
//! session_start = "17:00"
//! session_end = "16:00"
//!
//! [exclusions]
//! weekends = true
//! year_end = true
//! federal_holidays = true
//! holidays = ["2008-07-04"]
//!
//! [[assets]]
//! id = "AUD"
//! path = "ticks/AUD.csv.gz"
//!
//! [spillover]
//! mode = "signed"
//! window = 200
//! horizon = 10
//! lags = 2
//! bootstrap = 500
//! block_length = 50
//! ci_level = 0.95
//! seed = 7
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate, NaiveTime};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpillError};
use crate::ingest::{build_calendar, us_federal_holidays, IngestSettings, SessionCalendar};
use crate::realized::{BlockOrder, SystemMode, Transform};
use crate::rolling::RollingConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssetSource {
    pub id: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Exclusions {
    pub weekends: bool,
    pub year_end: bool,
    pub federal_holidays: bool,
    pub holidays: Vec<NaiveDate>,
}

impl Default for Exclusions {
    fn default() -> Self {
        Self {
            weekends: true,
            year_end: true,
            federal_holidays: true,
            holidays: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpilloverSection {
    pub mode: SystemMode,
    pub window: usize,
    pub horizon: usize,
    pub lags: usize,
    pub bootstrap: usize,
    pub block_length: usize,
    pub ci_level: f64,
    pub seed: u64,
    pub block_order: BlockOrder,
    pub transform: Transform,
    /// Extra window lengths re-run for robustness (written as `rolling_w<N>.csv`).
    pub robustness_windows: Vec<usize>,
    /// Precomputed `measures.csv`; defaults to the one in the output directory.
    pub measures: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl Default for SpilloverSection {
    fn default() -> Self {
        let r = RollingConfig::default();
        Self {
            mode: r.mode,
            window: r.window_length,
            horizon: r.horizon,
            lags: r.lag_order,
            bootstrap: r.bootstrap_reps,
            block_length: r.block_length,
            ci_level: r.ci_level,
            seed: r.rng_seed,
            block_order: r.block_order,
            transform: r.transform,
            robustness_windows: Vec::new(),
            measures: None,
            jobs: None,
        }
    }
}

impl SpilloverSection {
    pub fn rolling_config(&self) -> RollingConfig {
        RollingConfig {
            window_length: self.window,
            horizon: self.horizon,
            lag_order: self.lags,
            mode: self.mode,
            block_order: self.block_order,
            transform: self.transform,
            bootstrap_reps: self.bootstrap,
            block_length: self.block_length,
            ci_level: self.ci_level,
            rng_seed: self.seed,
            jobs: self.jobs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub output_dir: Option<PathBuf>,
    pub timezone: String,
    pub interval_minutes: u32,
    pub min_ticks: usize,
    pub session_start: String,
    pub session_end: String,
    pub exclusions: Exclusions,
    pub assets: Vec<AssetSource>,
    pub spillover: SpilloverSection,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            output_dir: None,
            timezone: "America/Chicago".into(),
            interval_minutes: 5,
            min_ticks: 10,
            session_start: "17:00".into(),
            session_end: "16:00".into(),
            exclusions: Exclusions::default(),
            assets: Vec::new(),
            spillover: SpilloverSection::default(),
        }
    }
}

/// A parsed config plus where it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: Config,
    pub path: PathBuf,
    pub base_dir: PathBuf,
    pub raw: Vec<u8>,
}

fn config_err(path: &Path, msg: impl std::fmt::Display) -> SpillError {
    SpillError::Config(format!("{}: {msg}", path.display()))
}

impl Config {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> Result<LoadedConfig> {
        let raw = std::fs::read(path).map_err(|e| config_err(path, format!("cannot read: {e}")))?;
        let text = std::str::from_utf8(&raw).map_err(|e| config_err(path, e))?;
        let config = Self::parse(text).map_err(|e| config_err(path, e))?;
        config.validate().map_err(|e| config_err(path, e))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedConfig {
            config,
            path: path.to_path_buf(),
            base_dir,
            raw,
        })
    }

    fn validate(&self) -> std::result::Result<(), String> {
        self.tz()?;
        self.session_times()?;
        if self.interval_minutes == 0 {
            return Err("interval_minutes must be positive".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for a in &self.assets {
            if a.id.is_empty() || a.id.contains([',', '/', '\\']) {
                return Err(format!(
                    "asset id `{}` must be non-empty without `,` or path separators",
                    a.id
                ));
            }
            if !seen.insert(&a.id) {
                return Err(format!("duplicate asset id `{}`", a.id));
            }
        }
        Ok(())
    }

    pub fn tz(&self) -> std::result::Result<Tz, String> {
        self.timezone
            .parse::<Tz>()
            .map_err(|_| format!("unknown timezone `{}`", self.timezone))
    }

    fn session_times(&self) -> std::result::Result<(NaiveTime, NaiveTime), String> {
        let parse = |s: &str| {
            NaiveTime::parse_from_str(s, "%H:%M")
                .or_else(|_| NaiveTime::parse_from_str(s, "%H:%M:%S"))
                .map_err(|_| format!("bad session time `{s}`"))
        };
        let start = parse(&self.session_start)?;
        let end = parse(&self.session_end)?;
        if start == end {
            return Err("session start and end coincide".into());
        }
        Ok((start, end))
    }

    pub fn calendar(&self) -> Result<SessionCalendar> {
        let (start, end) = self.session_times().map_err(SpillError::Config)?;
        let mut holidays = self.exclusions.holidays.clone();
        if self.exclusions.federal_holidays {
            for year in 1990..=2100 {
                holidays.extend(us_federal_holidays(year));
            }
        }
        Ok(build_calendar(
            self.exclusions.weekends,
            &holidays,
            self.exclusions.year_end,
        )
        .with_session(start, end))
    }

    pub fn ingest_settings(&self) -> Result<IngestSettings> {
        Ok(IngestSettings {
            calendar: self.calendar()?,
            interval: Duration::minutes(i64::from(self.interval_minutes)),
            min_ticks: self.min_ticks,
        })
    }
}

impl LoadedConfig {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// `--out` if given, else `output_dir` from the config, else `out/` next
    /// to the config file.
    pub fn output_dir(&self, cli: Option<&Path>) -> PathBuf {
        match (cli, &self.config.output_dir) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(p)) => self.resolve(p),
            (None, None) => self.base_dir.join("out"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = Config::parse("[[assets]]\nid = \"AUD\"\npath = \"aud.csv\"\n").unwrap();
        assert_eq!(c.interval_minutes, 5);
        assert_eq!(c.spillover.window, 200);
        assert_eq!(c.spillover.horizon, 10);
        assert_eq!(c.spillover.lags, 2);
        assert_eq!(c.spillover.mode, SystemMode::Plain);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::parse("windw = 3\n").is_err());
        assert!(Config::parse("[spillover]\nmode = \"both\"\n").is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut c = Config::default();
        c.timezone = "Mars/Olympus".into();
        assert!(c.validate().is_err());
        let mut c = Config::default();
        c.session_start = "25:00".into();
        assert!(c.validate().is_err());
        let mut c = Config::default();
        c.assets = vec![
            AssetSource {
                id: "A".into(),
                path: "a".into(),
            },
            AssetSource {
                id: "A".into(),
                path: "b".into(),
            },
        ];
        assert!(c.validate().is_err());
    }

    #[test]
    fn full_spillover_section() {
        let c = Config::parse(
            "[spillover]\nmode = \"signed\"\nwindow = 150\nseed = 7\nblock_order = \"negative_first\"\ntransform = \"log\"\nrobustness_windows = [100]\n",
        )
        .unwrap();
        let r = c.spillover.rolling_config();
        assert_eq!(r.mode, SystemMode::Signed);
        assert_eq!(r.window_length, 150);
        assert_eq!(r.rng_seed, 7);
        assert_eq!(r.block_order, BlockOrder::NegativeFirst);
        assert_eq!(r.transform, Transform::Log);
    }

    #[test]
    fn calendar_from_config() {
        let c = Config::default();
        let cal = c.calendar().unwrap();
        assert!(cal.is_excluded(NaiveDate::from_ymd_opt(2008, 11, 27).unwrap()));
        assert!(cal.is_excluded(NaiveDate::from_ymd_opt(2008, 12, 31).unwrap()));
        assert!(!cal.is_excluded(NaiveDate::from_ymd_opt(2008, 11, 26).unwrap()));
    }
}
