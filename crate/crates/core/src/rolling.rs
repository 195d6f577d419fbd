//! Rolling-window spillover estimation with circular block bootstrap
//! confidence intervals for SAM, directional SAM and signed TO spillovers.

use std::fmt::Write as _;

use chrono::NaiveDate;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connectedness::{
    directional_sam, directional_to_signed, sam, snapshot, SpilloverSnapshot, SystemLayout,
};
use crate::error::{Result, SpillError};
use crate::fevd::gfevd;
use crate::realized::{BlockOrder, MeasurePanel, SystemMode, Transform};
use crate::var::{fit_var, ma_coefficients};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RollingConfig {
    pub window_length: usize,
    pub horizon: usize,
    pub lag_order: usize,
    pub mode: SystemMode,
    pub block_order: BlockOrder,
    pub transform: Transform,
    /// Zero disables the bootstrap.
    pub bootstrap_reps: usize,
    pub block_length: usize,
    pub ci_level: f64,
    pub rng_seed: u64,
    /// Worker threads; `None` uses the machine's parallelism.
    pub jobs: Option<usize>,
}

impl Default for RollingConfig {
    fn default() -> Self {
        Self {
            window_length: 200,
            horizon: 10,
            lag_order: 2,
            mode: SystemMode::Plain,
            block_order: BlockOrder::PositiveFirst,
            transform: Transform::Raw,
            bootstrap_reps: 500,
            block_length: 50,
            ci_level: 0.95,
            rng_seed: 0,
            jobs: None,
        }
    }
}

impl RollingConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(SpillError::Config(msg));
        if self.lag_order == 0 {
            return bad("lag order must be at least 1".into());
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if self.window_length <= self.lag_order * dim + 1 {
            return bad(format!(
                "window length {} must exceed lag order × dimension + 1 = {}",
                self.window_length,
                self.lag_order * dim + 1
            ));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return bad(format!("ci_level {} must lie in (0, 1)", self.ci_level));
        }
        if self.bootstrap_reps > 0
            && (self.block_length == 0 || self.block_length >= self.window_length)
        {
            return bad(format!(
                "block length {} must be positive and shorter than the window {}",
                self.block_length, self.window_length
            ));
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        Ok(())
    }

    pub fn layout(&self, n_assets: usize) -> SystemLayout {
        match self.mode {
            SystemMode::Plain => SystemLayout::plain(n_assets),
            SystemMode::Signed => SystemLayout::signed(n_assets, self.block_order),
        }
    }
}

/// Percentile interval bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Bounds within this many percentage points of zero count as zero, so
/// rounding noise on exactly symmetric systems never rejects a null.
pub const ZERO_TOLERANCE: f64 = 1e-9;

impl Interval {
    pub fn excludes_zero(&self) -> bool {
        self.lo > ZERO_TOLERANCE || self.hi < -ZERO_TOLERANCE
    }
}

/// Bootstrap intervals for one window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowCi {
    pub sam: Interval,
    /// Per asset.
    pub dsam: Vec<Interval>,
    /// Per system variable: signed directional TO.
    pub to: Vec<Interval>,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum WindowOutcome {
    Estimated {
        snapshot: SpilloverSnapshot,
        ci: Option<WindowCi>,
    },
    Gap {
        window_end: NaiveDate,
        reason: String,
    },
}

impl WindowOutcome {
    pub fn window_end(&self) -> NaiveDate {
        match self {
            WindowOutcome::Estimated { snapshot, .. } => snapshot.window_end,
            WindowOutcome::Gap { window_end, .. } => *window_end,
        }
    }
}

/// Date-ordered results, one per eligible window end.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpilloverSeries {
    pub layout: SystemLayout,
    pub assets: Vec<String>,
    pub variables: Vec<String>,
    pub windows: Vec<WindowOutcome>,
}

impl SpilloverSeries {
    pub fn snapshots(&self) -> impl Iterator<Item = &SpilloverSnapshot> {
        self.windows.iter().filter_map(|w| match w {
            WindowOutcome::Estimated { snapshot, .. } => Some(snapshot),
            WindowOutcome::Gap { .. } => None,
        })
    }

    pub fn gaps(&self) -> impl Iterator<Item = (NaiveDate, &str)> {
        self.windows.iter().filter_map(|w| match w {
            WindowOutcome::Gap { window_end, reason } => Some((*window_end, reason.as_str())),
            WindowOutcome::Estimated { .. } => None,
        })
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Bootstrap seed for the window ending on `date`; independent of scheduling.
pub fn window_seed(rng_seed: u64, date: NaiveDate) -> u64 {
    use chrono::Datelike;
    mix64(mix64(rng_seed) ^ date.num_days_from_ce() as u64)
}

/// Lower and upper order statistics bracketing the central `level` mass.
fn percentile_interval(values: &mut [f64], level: f64) -> Interval {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let alpha = 1.0 - level;
    let lo = ((n as f64) * alpha / 2.0).floor() as usize;
    let hi = (((n as f64) * (1.0 - alpha / 2.0)).ceil() as usize).clamp(1, n) - 1;
    Interval {
        lo: values[lo.min(n - 1)],
        hi: values[hi.max(lo.min(n - 1))],
    }
}

/// Rebuilds a window-length sample from circularly wrapped blocks.
pub fn circular_block_resample<R: Rng + ?Sized>(
    window: &DMatrix<f64>,
    block_length: usize,
    rng: &mut R,
) -> DMatrix<f64> {
    let (t, k) = window.shape();
    let mut out = DMatrix::zeros(t, k);
    let mut filled = 0;
    while filled < t {
        let start = rng.random_range(0..t);
        for j in 0..block_length.min(t - filled) {
            out.row_mut(filled).copy_from(&window.row((start + j) % t));
            filled += 1;
        }
    }
    out
}

struct SignedMeasures {
    sam: f64,
    dsam: Vec<f64>,
    to: Vec<f64>,
}

fn signed_measures(
    window: &DMatrix<f64>,
    cfg: &RollingConfig,
    layout: &SystemLayout,
) -> Result<SignedMeasures> {
    let model = fit_var(window, cfg.lag_order)?;
    let ma = ma_coefficients(&model, cfg.horizon)?;
    let f = gfevd(&ma, &model.sigma_eps, cfg.horizon)?;
    Ok(SignedMeasures {
        sam: sam(&f, layout)?,
        dsam: (0..layout.n_assets)
            .map(|i| directional_sam(&f, layout, i))
            .collect::<Result<_>>()?,
        to: (0..layout.dim())
            .map(|c| directional_to_signed(&f, layout, c))
            .collect::<Result<_>>()?,
    })
}

/// Percentile intervals for SAM, each directional SAM and each signed TO
/// from a circular block bootstrap of the window's rows.
///
/// Replicates whose refit fails are redrawn, up to `10 × reps` draws in total.
pub fn bootstrap_ci(
    window: &DMatrix<f64>,
    cfg: &RollingConfig,
    layout: &SystemLayout,
    seed: u64,
) -> Result<WindowCi> {
    if layout.mode != SystemMode::Signed {
        return Err(SpillError::InvalidArgument(
            "bootstrap intervals need a signed system".into(),
        ));
    }
    if cfg.bootstrap_reps == 0 {
        return Err(SpillError::InvalidArgument(
            "bootstrap_reps must be positive".into(),
        ));
    }
    if window.ncols() != layout.dim() {
        return Err(SpillError::InvalidArgument(
            "window width does not match layout".into(),
        ));
    }
    if cfg.block_length == 0 || cfg.block_length >= window.nrows() {
        return Err(SpillError::InvalidArgument(
            "block length must be in 1..window length".into(),
        ));
    }
    let reps = cfg.bootstrap_reps;
    let n = layout.n_assets;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sams = Vec::with_capacity(reps);
    let mut dsams = vec![Vec::with_capacity(reps); n];
    let mut tos = vec![Vec::with_capacity(reps); 2 * n];
    let mut attempts = 0;
    while sams.len() < reps {
        if attempts >= 10 * reps {
            return Err(SpillError::BootstrapExhausted {
                attempts,
                successes: sams.len(),
            });
        }
        attempts += 1;
        let sample = circular_block_resample(window, cfg.block_length, &mut rng);
        let Ok(m) = signed_measures(&sample, cfg, layout) else {
            continue;
        };
        sams.push(m.sam);
        for (acc, v) in dsams.iter_mut().zip(m.dsam) {
            acc.push(v);
        }
        for (acc, v) in tos.iter_mut().zip(m.to) {
            acc.push(v);
        }
    }
    Ok(WindowCi {
        sam: percentile_interval(&mut sams, cfg.ci_level),
        dsam: dsams
            .iter_mut()
            .map(|v| percentile_interval(v, cfg.ci_level))
            .collect(),
        to: tos
            .iter_mut()
            .map(|v| percentile_interval(v, cfg.ci_level))
            .collect(),
        replicates: reps,
    })
}

fn estimate_window(
    window: &DMatrix<f64>,
    end: NaiveDate,
    cfg: &RollingConfig,
    layout: &SystemLayout,
) -> WindowOutcome {
    let fitted = fit_var(window, cfg.lag_order).and_then(|model| {
        let ma = ma_coefficients(&model, cfg.horizon)?;
        let f = gfevd(&ma, &model.sigma_eps, cfg.horizon)?;
        snapshot(&f, layout, end, model.stationary)
    });
    match fitted {
        Err(e) => {
            log::warn!("window ending {end}: {e}");
            WindowOutcome::Gap {
                window_end: end,
                reason: e.to_string(),
            }
        }
        Ok(snapshot) => {
            let ci = if layout.mode == SystemMode::Signed && cfg.bootstrap_reps > 0 {
                match bootstrap_ci(window, cfg, layout, window_seed(cfg.rng_seed, end)) {
                    Ok(ci) => Some(ci),
                    Err(e) => {
                        log::warn!("window ending {end}: bootstrap failed: {e}");
                        None
                    }
                }
            } else {
                None
            };
            WindowOutcome::Estimated { snapshot, ci }
        }
    }
}

/// Fits every window of `cfg.window_length` consecutive panel rows.
///
/// Windows whose estimation fails become gap records; the date sequence of
/// the output is exactly the panel's eligible window ends.
pub fn run_rolling(panel: &MeasurePanel, cfg: &RollingConfig) -> Result<SpilloverSeries> {
    let layout = cfg.layout(panel.assets().len());
    cfg.validate(layout.dim())?;
    let t = panel.len();
    let w = cfg.window_length;
    if t < w {
        return Err(SpillError::TooFewObservations { needed: w, got: t });
    }
    let data = panel.data_matrix(cfg.mode, cfg.block_order, cfg.transform)?;
    let days = panel.days();

    let run = || -> Vec<WindowOutcome> {
        (w - 1..t)
            .into_par_iter()
            .map(|end| {
                let window = data.rows(end + 1 - w, w).into_owned();
                estimate_window(&window, days[end], cfg, &layout)
            })
            .collect()
    };
    let windows = match cfg.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| SpillError::Config(format!("cannot start {jobs} workers: {e}")))?
            .install(run),
        None => run(),
    };

    Ok(SpilloverSeries {
        layout,
        assets: panel.assets().to_vec(),
        variables: panel.variable_names(cfg.mode, cfg.block_order),
        windows,
    })
}

/// Rejection flags for one window at the interval's nominal level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisFlags {
    pub window_end: NaiveDate,
    /// SAM = 0.
    pub h1: bool,
    /// Signed TO of each variable = 0.
    pub h2: Vec<bool>,
    /// Directional SAM of each asset = 0.
    pub h3: Vec<bool>,
}

/// A null is rejected when zero lies outside its bootstrap interval. Windows
/// without intervals are skipped.
pub fn test_hypotheses(series: &SpilloverSeries) -> Vec<HypothesisFlags> {
    series
        .windows
        .iter()
        .filter_map(|w| match w {
            WindowOutcome::Estimated {
                snapshot,
                ci: Some(ci),
            } => Some(HypothesisFlags {
                window_end: snapshot.window_end,
                h1: ci.sam.excludes_zero(),
                h2: ci.to.iter().map(Interval::excludes_zero).collect(),
                h3: ci.dsam.iter().map(Interval::excludes_zero).collect(),
            }),
            _ => None,
        })
        .collect()
}

/// Column names of `rolling.csv` for a series.
pub fn rolling_header(series: &SpilloverSeries) -> Vec<String> {
    let mut h = vec!["window_end".to_string(), "total".to_string()];
    let signed = series.layout.mode == SystemMode::Signed;
    if signed {
        h.extend(["sam", "sam_lo", "sam_hi"].map(String::from));
    }
    h.extend(series.variables.iter().map(|v| format!("to_{v}")));
    if !signed {
        h.extend(series.variables.iter().map(|v| format!("from_{v}")));
        h.extend(series.assets.iter().map(|a| format!("net_{a}")));
    } else {
        for a in &series.assets {
            h.push(format!("dsam_{a}"));
            h.push(format!("dsam_{a}_lo"));
            h.push(format!("dsam_{a}_hi"));
        }
    }
    h.push("stationary".into());
    h
}

fn push_num(row: &mut String, v: f64) {
    let _ = write!(row, ",{v}");
}

/// `rolling.csv` contents. Gap windows keep their date with empty cells.
pub fn rolling_csv(series: &SpilloverSeries) -> String {
    let header = rolling_header(series);
    let mut out = header.join(",");
    out.push('\n');
    let signed = series.layout.mode == SystemMode::Signed;
    for w in &series.windows {
        let mut row = w.window_end().to_string();
        match w {
            WindowOutcome::Gap { .. } => {
                row.push_str(&",".repeat(header.len() - 1));
            }
            WindowOutcome::Estimated { snapshot: s, ci } => {
                push_num(&mut row, s.total);
                if signed {
                    push_num(&mut row, s.sam.unwrap_or(f64::NAN));
                    match ci {
                        Some(ci) => {
                            push_num(&mut row, ci.sam.lo);
                            push_num(&mut row, ci.sam.hi);
                        }
                        None => row.push_str(",,"),
                    }
                }
                for &v in &s.to {
                    push_num(&mut row, v);
                }
                if !signed {
                    for &v in s.from.iter().chain(&s.net) {
                        push_num(&mut row, v);
                    }
                } else {
                    for (i, &d) in s.dsam.iter().enumerate() {
                        push_num(&mut row, d);
                        match ci {
                            Some(ci) => {
                                push_num(&mut row, ci.dsam[i].lo);
                                push_num(&mut row, ci.dsam[i].hi);
                            }
                            None => row.push_str(",,"),
                        }
                    }
                }
                let _ = write!(row, ",{}", s.stationary);
            }
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// `hypotheses.csv` contents.
pub fn hypotheses_csv(series: &SpilloverSeries, flags: &[HypothesisFlags]) -> String {
    let mut out = String::from("window_end,h1_reject");
    for v in &series.variables {
        let _ = write!(out, ",h2_reject_{v}");
    }
    for a in &series.assets {
        let _ = write!(out, ",h3_reject_{a}");
    }
    out.push('\n');
    for f in flags {
        let _ = write!(out, "{},{}", f.window_end, f.h1);
        for b in f.h2.iter().chain(&f.h3) {
            let _ = write!(out, ",{b}");
        }
        out.push('\n');
    }
    out
}
