//! Daily realized variance and signed realized semivariances.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpillError};
use crate::ingest::IntradayGrid;

/// Realized measures for one asset on one trading day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyMeasures {
    pub trading_day: NaiveDate,
    pub rv: f64,
    pub rs_neg: f64,
    pub rs_pos: f64,
}

/// First differences of the log-price grid.
pub fn intraday_returns(grid: &IntradayGrid) -> Result<Vec<f64>> {
    if grid.log_prices.len() < 2 {
        return Err(SpillError::DegenerateDay(format!(
            "{} on {} has {} grid points, need at least 2",
            grid.asset_id,
            grid.trading_day,
            grid.log_prices.len()
        )));
    }
    Ok(grid.log_prices.windows(2).map(|w| w[1] - w[0]).collect())
}

pub fn realized_variance(returns: &[f64]) -> Result<f64> {
    if returns.is_empty() {
        return Err(SpillError::InvalidArgument(
            "realized variance of an empty return series".into(),
        ));
    }
    Ok(returns.iter().map(|r| r * r).sum())
}

/// `(rs_neg, rs_pos)`. Zero returns count towards `rs_pos`.
pub fn realized_semivariances(returns: &[f64]) -> Result<(f64, f64)> {
    if returns.is_empty() {
        return Err(SpillError::InvalidArgument(
            "semivariances of an empty return series".into(),
        ));
    }
    let (mut neg, mut pos) = (0.0, 0.0);
    for &r in returns {
        if r < 0.0 {
            neg += r * r;
        } else {
            pos += r * r;
        }
    }
    Ok((neg, pos))
}

/// All three measures from one pass over the returns.
///
/// `rv` is formed as `rs_neg + rs_pos` so the decomposition holds to rounding
/// of a single addition.
pub fn daily_measures(grid: &IntradayGrid) -> Result<DailyMeasures> {
    let returns = intraday_returns(grid)?;
    let (rs_neg, rs_pos) = realized_semivariances(&returns)?;
    Ok(DailyMeasures {
        trading_day: grid.trading_day,
        rv: rs_neg + rs_pos,
        rs_neg,
        rs_pos,
    })
}

/// Which realized series feeds the VAR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemMode {
    /// `N` realized variances.
    #[default]
    Plain,
    /// `2N` realized semivariances.
    Signed,
}

/// Which sign occupies the first `N` positions of a signed system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockOrder {
    #[default]
    PositiveFirst,
    NegativeFirst,
}

/// Optional transform applied to the measures before estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    Raw,
    Log,
}

/// Rectangular days × assets table of daily measures.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurePanel {
    assets: Vec<String>,
    days: Vec<NaiveDate>,
    /// `values[t][i]` is asset `i` on day `t`.
    values: Vec<Vec<DailyMeasures>>,
}

/// Dates removed while aligning assets.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PanelReport {
    pub dropped: Vec<(NaiveDate, Vec<String>)>,
}

/// Restricts each asset to the dates every asset has.
///
/// The report lists every dropped date with the assets missing it.
pub fn build_panel(
    measures: &BTreeMap<String, Vec<DailyMeasures>>,
    assets: &[String],
) -> Result<(MeasurePanel, PanelReport)> {
    if assets.is_empty() {
        return Err(SpillError::InvalidArgument(
            "panel needs at least one asset".into(),
        ));
    }
    let mut by_asset: Vec<BTreeMap<NaiveDate, DailyMeasures>> = Vec::with_capacity(assets.len());
    for a in assets {
        let rows = measures
            .get(a)
            .ok_or_else(|| SpillError::Data(format!("no measures for asset {a}")))?;
        by_asset.push(rows.iter().map(|m| (m.trading_day, *m)).collect());
    }

    let all: BTreeSet<NaiveDate> = by_asset.iter().flat_map(|m| m.keys().copied()).collect();
    let mut days = Vec::new();
    let mut report = PanelReport::default();
    for day in all {
        let missing: Vec<String> = assets
            .iter()
            .zip(&by_asset)
            .filter(|(_, m)| !m.contains_key(&day))
            .map(|(a, _)| a.clone())
            .collect();
        if missing.is_empty() {
            days.push(day);
        } else {
            report.dropped.push((day, missing));
        }
    }
    if days.is_empty() {
        return Err(SpillError::EmptyResult(
            "assets share no common trading days".into(),
        ));
    }
    let values = days
        .iter()
        .map(|d| by_asset.iter().map(|m| m[d]).collect())
        .collect();
    Ok((
        MeasurePanel {
            assets: assets.to_vec(),
            days,
            values,
        },
        report,
    ))
}

impl MeasurePanel {
    /// Builds a panel directly from aligned rows.
    pub fn from_rows(
        assets: Vec<String>,
        days: Vec<NaiveDate>,
        values: Vec<Vec<DailyMeasures>>,
    ) -> Result<Self> {
        if values.len() != days.len() || values.iter().any(|r| r.len() != assets.len()) {
            return Err(SpillError::Data("panel is not rectangular".into()));
        }
        if days.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SpillError::Data(
                "panel days must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            assets,
            days,
            values,
        })
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    pub fn days(&self) -> &[NaiveDate] {
        &self.days
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn row(&self, t: usize) -> &[DailyMeasures] {
        &self.values[t]
    }

    /// Variable labels matching [`MeasurePanel::data_matrix`] columns.
    pub fn variable_names(&self, mode: SystemMode, order: BlockOrder) -> Vec<String> {
        match mode {
            SystemMode::Plain => self.assets.clone(),
            SystemMode::Signed => {
                let pos = self.assets.iter().map(|a| format!("{a}_pos"));
                let neg = self.assets.iter().map(|a| format!("{a}_neg"));
                match order {
                    BlockOrder::PositiveFirst => pos.chain(neg).collect(),
                    BlockOrder::NegativeFirst => neg.chain(pos).collect(),
                }
            }
        }
    }

    /// `T × k` data block: RV columns in plain mode, semivariance blocks in
    /// signed mode.
    pub fn data_matrix(
        &self,
        mode: SystemMode,
        order: BlockOrder,
        transform: Transform,
    ) -> Result<DMatrix<f64>> {
        let n = self.assets.len();
        let k = match mode {
            SystemMode::Plain => n,
            SystemMode::Signed => 2 * n,
        };
        let mut m = DMatrix::zeros(self.days.len(), k);
        for (t, row) in self.values.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                match mode {
                    SystemMode::Plain => m[(t, i)] = v.rv,
                    SystemMode::Signed => {
                        let (first, second) = match order {
                            BlockOrder::PositiveFirst => (v.rs_pos, v.rs_neg),
                            BlockOrder::NegativeFirst => (v.rs_neg, v.rs_pos),
                        };
                        m[(t, i)] = first;
                        m[(t, n + i)] = second;
                    }
                }
            }
        }
        if transform == Transform::Log {
            for t in 0..m.nrows() {
                for c in 0..k {
                    let v = m[(t, c)];
                    if v <= 0.0 {
                        return Err(SpillError::Data(format!(
                            "log transform of non-positive measure on {} (column {c})",
                            self.days[t]
                        )));
                    }
                    m[(t, c)] = v.ln();
                }
            }
        }
        Ok(m)
    }
}

/// Writes `date,asset,rv,rs_neg,rs_pos` rows, day-major then asset order.
pub fn write_measures_csv(panel: &MeasurePanel, path: &Path) -> Result<()> {
    let mut out = String::from("date,asset,rv,rs_neg,rs_pos\n");
    for (t, day) in panel.days.iter().enumerate() {
        for (a, v) in panel.assets.iter().zip(&panel.values[t]) {
            out.push_str(&format!("{day},{a},{},{},{}\n", v.rv, v.rs_neg, v.rs_pos));
        }
    }
    std::fs::write(path, out).map_err(|source| SpillError::Io {
        stage: "measures",
        path: path.to_path_buf(),
        source,
    })
}

/// Reads `measures.csv` back into a panel. Asset order is first appearance.
pub fn read_measures_csv(path: &Path) -> Result<(MeasurePanel, PanelReport)> {
    let text = std::fs::read_to_string(path).map_err(|source| SpillError::Io {
        stage: "spillover",
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |line: usize, msg: String| SpillError::Malformed {
        stage: "spillover",
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "date,asset,rv,rs_neg,rs_pos" => {}
        _ => {
            return Err(bad(
                1,
                "expected header `date,asset,rv,rs_neg,rs_pos`".into(),
            ))
        }
    }
    let mut assets: Vec<String> = Vec::new();
    let mut measures: BTreeMap<String, Vec<DailyMeasures>> = BTreeMap::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 5 {
            return Err(bad(lineno, format!("expected 5 fields, found {}", f.len())));
        }
        let day = NaiveDate::parse_from_str(f[0], "%Y-%m-%d")
            .map_err(|_| bad(lineno, format!("bad date `{}`", f[0])))?;
        let num = |s: &str| -> Result<f64> {
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
                _ => Err(bad(lineno, format!("bad measure `{s}`"))),
            }
        };
        let m = DailyMeasures {
            trading_day: day,
            rv: num(f[2])?,
            rs_neg: num(f[3])?,
            rs_pos: num(f[4])?,
        };
        if !measures.contains_key(f[1]) {
            assets.push(f[1].to_string());
        }
        measures.entry(f[1].to_string()).or_default().push(m);
    }
    build_panel(&measures, &assets)
}
