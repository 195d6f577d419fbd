//! Pipeline stages behind the `spillnet` subcommands.
//!
//! Output directory layout:
//!
//! ```text
//! grids/<asset>/<date>.csv    resampled log prices
//! ingest_report.csv           per-asset tick and day accounting
//! ingest_days_dropped.csv     asset,date,reason
//! ingest_malformed.csv        asset,line,reason
//! measures.csv                date,asset,rv,rs_neg,rs_pos
//! measures_dropped.csv        dates removed by the cross-asset intersection
//! spillover_table.csv         full-sample decomposition table
//! var_full.json               full-sample VAR fit
//! rolling.csv                 rolling indices
//! rolling_w<N>.csv            robustness windows
//! hypotheses.csv              bootstrap test flags (signed mode)
//! aic.csv                     optional lag diagnostic
//! fig_*.csv                   plot-ready series
//! manifest.json
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde_json::json;

use crate::config::LoadedConfig;
use crate::connectedness::write_spillover_table;
use crate::error::{Result, SpillError};
use crate::fevd::gfevd;
use crate::ingest::{ingest_series, read_grid_csv, read_tick_csv, write_grid_csv, AssetReport};
use crate::manifest::{digest_file, digest_outputs, now_rfc3339, RunManifest, StageRecord};
use crate::realized::{
    build_panel, daily_measures, read_measures_csv, write_measures_csv, DailyMeasures, SystemMode,
};
use crate::rolling::{
    hypotheses_csv, rolling_csv, run_rolling, test_hypotheses, RollingConfig, SpilloverSeries,
};
use crate::var::{aic_table, fit_var, ma_coefficients};

/// A loaded config and the directory outputs go to.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: LoadedConfig,
    pub out_dir: PathBuf,
}

impl RunContext {
    pub fn new(config: LoadedConfig, out: Option<&Path>) -> Result<Self> {
        let out_dir = config.output_dir(out);
        std::fs::create_dir_all(&out_dir).map_err(|source| SpillError::Io {
            stage: "setup",
            path: out_dir.clone(),
            source,
        })?;
        Ok(Self { config, out_dir })
    }

    fn manifest(&self) -> Result<RunManifest> {
        RunManifest::open(&self.out_dir, &self.config.path, &self.config.raw)
    }
}

/// Command-line values that take precedence over the `[spillover]` section.
#[derive(Debug, Clone, Default)]
pub struct SpilloverOverrides {
    pub mode: Option<SystemMode>,
    pub window: Option<usize>,
    pub horizon: Option<usize>,
    pub lags: Option<usize>,
    pub bootstrap: Option<usize>,
    pub block_length: Option<usize>,
    pub ci_level: Option<f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub measures: Option<PathBuf>,
    pub robustness_windows: Option<Vec<usize>>,
    pub aic_max: Option<usize>,
}

fn write_text(stage: &'static str, path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| SpillError::Io {
            stage,
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| SpillError::Io {
        stage,
        path: path.to_path_buf(),
        source,
    })
}

fn remove_if_present(stage: &'static str, path: &Path) -> Result<()> {
    match std::fs::remove_file(path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(SpillError::Io {
            stage,
            path: path.to_path_buf(),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn csv_cell(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

// ---------------------------------------------------------------- ingest

#[derive(Debug, Clone)]
pub struct IngestSummary {
    pub reports: Vec<AssetReport>,
    pub grid_files: usize,
}

impl fmt::Display for IngestSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ingest: {} grid files", self.grid_files)?;
        for r in &self.reports {
            writeln!(
                f,
                "  {:<8} ticks {:>9}  malformed {:>5}  off-session {:>7}  excluded-day {:>7}  days kept {:>5}  dropped {:>4}",
                r.asset_id,
                r.ticks_read,
                r.malformed_rows.len(),
                r.off_session_ticks,
                r.excluded_day_ticks,
                r.days_kept,
                r.days_dropped.len()
            )?;
        }
        Ok(())
    }
}

pub fn cmd_ingest(ctx: &RunContext) -> Result<IngestSummary> {
    let started_at = now_rfc3339();
    let cfg = &ctx.config.config;
    if cfg.assets.is_empty() {
        return Err(SpillError::Config(format!(
            "{}: no [[assets]] configured",
            ctx.config.path.display()
        )));
    }
    let tz = cfg.tz().map_err(SpillError::Config)?;
    let settings = cfg.ingest_settings()?;
    let grids_dir = ctx.out_dir.join("grids");
    if grids_dir.exists() {
        std::fs::remove_dir_all(&grids_dir).map_err(|source| SpillError::Io {
            stage: "ingest",
            path: grids_dir.clone(),
            source,
        })?;
    }

    let results: Vec<(AssetReport, Vec<PathBuf>)> = cfg
        .assets
        .par_iter()
        .map(|asset| -> Result<(AssetReport, Vec<PathBuf>)> {
            let path = ctx.config.resolve(&asset.path);
            let (series, malformed) = read_tick_csv(&path, &asset.id, tz)?;
            let (grids, mut report) = ingest_series(&series, &settings).map_err(|e| e.in_stage("ingest"))?;
            report.source = path.clone();
            report.ticks_read += malformed.len();
            report.malformed_rows = malformed;
            if grids.is_empty() {
                return Err(SpillError::EmptyResult(format!(
                    "{}: no usable trading days for asset {} ({} ticks off-session, {} on excluded dates, {} days below the tick minimum)",
                    path.display(),
                    asset.id,
                    report.off_session_ticks,
                    report.excluded_day_ticks,
                    report.days_dropped.len()
                ))
                .in_stage("ingest"));
            }
            let mut rel = Vec::with_capacity(grids.len());
            for g in &grids {
                let r = PathBuf::from("grids").join(&asset.id).join(format!("{}.csv", g.trading_day));
                let full = ctx.out_dir.join(&r);
                if let Some(parent) = full.parent() {
                    std::fs::create_dir_all(parent).map_err(|source| SpillError::Io {
                        stage: "ingest",
                        path: parent.to_path_buf(),
                        source,
                    })?;
                }
                write_grid_csv(g, &full)?;
                rel.push(r);
            }
            log::info!("{}: {} days kept", asset.id, grids.len());
            Ok((report, rel))
        })
        .collect::<Result<_>>()?;

    let mut report_csv =
        String::from("asset,source,ticks_read,malformed_rows,off_session_ticks,excluded_day_ticks,days_kept,days_dropped\n");
    let mut dropped_csv = String::from("asset,date,reason\n");
    let mut malformed_csv = String::from("asset,line,reason\n");
    let mut outputs: Vec<PathBuf> = Vec::new();
    let mut inputs = Vec::new();
    for (r, rel) in &results {
        report_csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.asset_id,
            csv_cell(&r.source.display().to_string()),
            r.ticks_read,
            r.malformed_rows.len(),
            r.off_session_ticks,
            r.excluded_day_ticks,
            r.days_kept,
            r.days_dropped.len()
        ));
        for (d, why) in &r.days_dropped {
            dropped_csv.push_str(&format!("{},{d},{}\n", r.asset_id, csv_cell(why)));
        }
        for m in &r.malformed_rows {
            malformed_csv.push_str(&format!(
                "{},{},{}\n",
                r.asset_id,
                m.line,
                csv_cell(&m.reason)
            ));
        }
        outputs.extend(rel.iter().cloned());
        inputs.push(digest_file(&r.source, r.source.display().to_string())?);
    }
    for (name, text) in [
        ("ingest_report.csv", &report_csv),
        ("ingest_days_dropped.csv", &dropped_csv),
        ("ingest_malformed.csv", &malformed_csv),
    ] {
        write_text("ingest", &ctx.out_dir.join(name), text)?;
        outputs.push(name.into());
    }

    let mut manifest = ctx.manifest()?;
    manifest.record(
        "ingest",
        StageRecord {
            started_at,
            finished_at: now_rfc3339(),
            inputs,
            outputs: digest_outputs(&ctx.out_dir, &outputs)?,
            parameters: json!({
                "timezone": cfg.timezone,
                "session_start": cfg.session_start,
                "session_end": cfg.session_end,
                "interval_minutes": cfg.interval_minutes,
                "min_ticks": cfg.min_ticks,
                "exclusions": cfg.exclusions,
                "assets": cfg.assets,
                "sampling": "previous tick",
            }),
            notes: Vec::new(),
        },
    );
    manifest.write(&ctx.out_dir)?;

    let grid_files = results.iter().map(|(_, rel)| rel.len()).sum();
    Ok(IngestSummary {
        reports: results.into_iter().map(|(r, _)| r).collect(),
        grid_files,
    })
}

// ---------------------------------------------------------------- measures

#[derive(Debug, Clone)]
pub struct MeasuresSummary {
    pub assets: Vec<String>,
    pub days: usize,
    pub dropped: Vec<(NaiveDate, Vec<String>)>,
    pub first: NaiveDate,
    pub last: NaiveDate,
}

impl fmt::Display for MeasuresSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "measures: {} assets × {} days ({} to {}), {} dates dropped by alignment",
            self.assets.len(),
            self.days,
            self.first,
            self.last,
            self.dropped.len()
        )
    }
}

fn asset_grids(ctx: &RunContext, asset: &str) -> Result<Vec<(NaiveDate, PathBuf)>> {
    let dir = ctx.out_dir.join("grids").join(asset);
    let entries = std::fs::read_dir(&dir).map_err(|source| SpillError::Io {
        stage: "measures",
        path: dir.clone(),
        source,
    })?;
    let mut out = Vec::new();
    for e in entries {
        let path = e
            .map_err(|source| SpillError::Io {
                stage: "measures",
                path: dir.clone(),
                source,
            })?
            .path();
        if path.extension().and_then(|s| s.to_str()) != Some("csv") {
            continue;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default();
        let day = NaiveDate::parse_from_str(stem, "%Y-%m-%d").map_err(|_| {
            SpillError::Data(format!("{}: grid file name is not a date", path.display()))
                .in_stage("measures")
        })?;
        out.push((day, path));
    }
    out.sort();
    Ok(out)
}

pub fn cmd_measures(ctx: &RunContext) -> Result<MeasuresSummary> {
    let started_at = now_rfc3339();
    let cfg = &ctx.config.config;
    let ids: Vec<String> = cfg.assets.iter().map(|a| a.id.clone()).collect();
    if ids.is_empty() {
        return Err(SpillError::Config(format!(
            "{}: no [[assets]] configured",
            ctx.config.path.display()
        )));
    }
    let interval = chrono::Duration::minutes(i64::from(cfg.interval_minutes));

    let per_asset: Vec<(String, Vec<DailyMeasures>, Vec<PathBuf>)> = ids
        .par_iter()
        .map(|id| -> Result<_> {
            let files = asset_grids(ctx, id)?;
            let mut rows = Vec::with_capacity(files.len());
            let mut paths = Vec::with_capacity(files.len());
            for (day, path) in files {
                let grid = read_grid_csv(&path, id, day, interval)?;
                rows.push(daily_measures(&grid).map_err(|e| {
                    SpillError::Data(format!("{}: {e}", path.display())).in_stage("measures")
                })?);
                paths.push(path);
            }
            Ok((id.clone(), rows, paths))
        })
        .collect::<Result<_>>()?;

    let mut inputs = Vec::new();
    let mut measures = BTreeMap::new();
    for (id, rows, paths) in per_asset {
        for p in paths {
            let label = p
                .strip_prefix(&ctx.out_dir)
                .unwrap_or(&p)
                .to_string_lossy()
                .replace('\\', "/");
            inputs.push(digest_file(&p, label)?);
        }
        measures.insert(id, rows);
    }
    let (panel, report) = build_panel(&measures, &ids).map_err(|e| e.in_stage("measures"))?;

    write_measures_csv(&panel, &ctx.out_dir.join("measures.csv"))?;
    let mut dropped = String::from("date,missing_assets\n");
    for (d, missing) in &report.dropped {
        dropped.push_str(&format!("{d},{}\n", missing.join(";")));
    }
    write_text(
        "measures",
        &ctx.out_dir.join("measures_dropped.csv"),
        &dropped,
    )?;

    let mut manifest = ctx.manifest()?;
    manifest.record(
        "measures",
        StageRecord {
            started_at,
            finished_at: now_rfc3339(),
            inputs,
            outputs: digest_outputs(
                &ctx.out_dir,
                &["measures.csv".into(), "measures_dropped.csv".into()],
            )?,
            parameters: json!({
                "assets": ids,
                "interval_minutes": cfg.interval_minutes,
                "alignment": "intersection of trading days",
            }),
            notes: Vec::new(),
        },
    );
    manifest.write(&ctx.out_dir)?;

    Ok(MeasuresSummary {
        assets: panel.assets().to_vec(),
        days: panel.len(),
        dropped: report.dropped,
        first: panel.days()[0],
        last: *panel.days().last().expect("panel is non-empty"),
    })
}

// ---------------------------------------------------------------- spillover

#[derive(Debug, Clone)]
pub struct SpilloverSummary {
    pub cfg: RollingConfig,
    pub panel_days: usize,
    pub variables: Vec<String>,
    pub full_total: f64,
    pub full_sam: Option<f64>,
    pub full_stationary: bool,
    pub windows: usize,
    pub gaps: usize,
    pub mean_total: f64,
    pub mean_sam: Option<f64>,
    pub h1_rejections: Option<(usize, usize)>,
    pub robustness: Vec<(usize, usize, usize)>,
}

impl fmt::Display for SpilloverSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.cfg.mode {
            SystemMode::Plain => "plain",
            SystemMode::Signed => "signed",
        };
        writeln!(
            f,
            "spillover: {mode} system, {} variables, {} days, window {}, horizon {}, lags {}",
            self.variables.len(),
            self.panel_days,
            self.cfg.window_length,
            self.cfg.horizon,
            self.cfg.lag_order
        )?;
        write!(f, "  full sample: total {:.2}%", self.full_total)?;
        if let Some(s) = self.full_sam {
            write!(f, ", SAM {s:.2}")?;
        }
        writeln!(
            f,
            "{}",
            if self.full_stationary {
                ""
            } else {
                " (non-stationary fit)"
            }
        )?;
        write!(
            f,
            "  rolling: {} windows, {} gaps, mean total {:.2}%",
            self.windows, self.gaps, self.mean_total
        )?;
        if let Some(s) = self.mean_sam {
            write!(f, ", mean SAM {s:.2}")?;
        }
        writeln!(f)?;
        if let Some((rej, n)) = self.h1_rejections {
            writeln!(
                f,
                "  H1 (SAM = 0) rejected in {rej} of {n} windows at {:.0}%",
                100.0 * self.cfg.ci_level
            )?;
        }
        for (w, n, g) in &self.robustness {
            writeln!(f, "  robustness window {w}: {n} windows, {g} gaps")?;
        }
        Ok(())
    }
}

fn resolved_rolling_config(ctx: &RunContext, o: &SpilloverOverrides) -> RollingConfig {
    let mut cfg = ctx.config.config.spillover.rolling_config();
    if let Some(v) = o.mode {
        cfg.mode = v;
    }
    if let Some(v) = o.window {
        cfg.window_length = v;
    }
    if let Some(v) = o.horizon {
        cfg.horizon = v;
    }
    if let Some(v) = o.lags {
        cfg.lag_order = v;
    }
    if let Some(v) = o.bootstrap {
        cfg.bootstrap_reps = v;
    }
    if let Some(v) = o.block_length {
        cfg.block_length = v;
    }
    if let Some(v) = o.ci_level {
        cfg.ci_level = v;
    }
    if let Some(v) = o.seed {
        cfg.rng_seed = v;
    }
    if o.jobs.is_some() {
        cfg.jobs = o.jobs;
    }
    cfg
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn log_gaps(series: &SpilloverSeries) {
    for (d, why) in series.gaps() {
        log::warn!("window ending {d}: {why}");
    }
}

pub fn cmd_spillover(ctx: &RunContext, overrides: &SpilloverOverrides) -> Result<SpilloverSummary> {
    let started_at = now_rfc3339();
    let section = &ctx.config.config.spillover;
    let cfg = resolved_rolling_config(ctx, overrides);
    let measures_path = match (&overrides.measures, &section.measures) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => ctx.config.resolve(p),
        (None, None) => ctx.out_dir.join("measures.csv"),
    };
    let robustness = overrides
        .robustness_windows
        .clone()
        .unwrap_or_else(|| section.robustness_windows.clone());

    let (panel, _) = read_measures_csv(&measures_path)?;
    let layout = cfg.layout(panel.assets().len());
    cfg.validate(layout.dim())?;
    let variables = panel.variable_names(cfg.mode, cfg.block_order);
    let mut outputs: Vec<PathBuf> = Vec::new();
    let mut notes = vec![format!("variable order: {}", variables.join(" "))];

    // Full-sample fit.
    let data = panel
        .data_matrix(cfg.mode, cfg.block_order, cfg.transform)
        .map_err(|e| e.in_stage("spillover"))?;
    let full = (|| -> Result<_> {
        let model = fit_var(&data, cfg.lag_order)?;
        let ma = ma_coefficients(&model, cfg.horizon)?;
        let fevd = gfevd(&ma, &model.sigma_eps, cfg.horizon)?;
        Ok((model, fevd))
    })()
    .map_err(|e| {
        e.context(format!("full sample of {}", measures_path.display()))
            .in_stage("spillover")
    })?;
    let (model, fevd) = full;
    if !model.stationary {
        log::warn!(
            "full-sample VAR is not stationary (spectral radius {})",
            model.spectral_radius
        );
        notes.push(format!(
            "full-sample VAR not stationary, spectral radius {}",
            model.spectral_radius
        ));
    }
    write_spillover_table(
        &fevd,
        &layout,
        &variables,
        &ctx.out_dir.join("spillover_table.csv"),
    )?;
    outputs.push("spillover_table.csv".into());
    write_text(
        "spillover",
        &ctx.out_dir.join("var_full.json"),
        &(model.to_json() + "\n"),
    )?;
    outputs.push("var_full.json".into());
    let full_snapshot = crate::connectedness::snapshot(
        &fevd,
        &layout,
        *panel.days().last().expect("non-empty"),
        model.stationary,
    )?;

    if let Some(p_max) = overrides.aic_max {
        let table = aic_table(&data, p_max).map_err(|e| e.in_stage("spillover"))?;
        let mut text = String::from("lag,aic\n");
        for (p, a) in table {
            text.push_str(&format!("{p},{a}\n"));
        }
        write_text("spillover", &ctx.out_dir.join("aic.csv"), &text)?;
        outputs.push("aic.csv".into());
    }

    // Rolling windows.
    let series = run_rolling(&panel, &cfg).map_err(|e| {
        e.context(measures_path.display().to_string())
            .in_stage("spillover")
    })?;
    log_gaps(&series);
    write_text(
        "spillover",
        &ctx.out_dir.join("rolling.csv"),
        &rolling_csv(&series),
    )?;
    outputs.push("rolling.csv".into());

    let hyp_path = ctx.out_dir.join("hypotheses.csv");
    let mut h1_rejections = None;
    if cfg.mode == SystemMode::Signed {
        let flags = test_hypotheses(&series);
        h1_rejections = Some((flags.iter().filter(|f| f.h1).count(), flags.len()));
        if cfg.bootstrap_reps == 0 {
            notes.push("bootstrap disabled: hypotheses.csv has no rows".into());
        }
        write_text("spillover", &hyp_path, &hypotheses_csv(&series, &flags))?;
        outputs.push("hypotheses.csv".into());
    } else {
        remove_if_present("spillover", &hyp_path)?;
        notes.push("hypotheses.csv absent: plain-mode run".into());
    }

    let mut robustness_counts = Vec::new();
    for w in robustness {
        let rcfg = RollingConfig {
            window_length: w,
            ..cfg.clone()
        };
        let s = run_rolling(&panel, &rcfg).map_err(|e| {
            e.context(format!("{} (window {w})", measures_path.display()))
                .in_stage("spillover")
        })?;
        log_gaps(&s);
        let name = format!("rolling_w{w}.csv");
        write_text("spillover", &ctx.out_dir.join(&name), &rolling_csv(&s))?;
        outputs.push(name.into());
        robustness_counts.push((w, s.windows.len(), s.gaps().count()));
    }

    let mut manifest = ctx.manifest()?;
    manifest.record(
        "spillover",
        StageRecord {
            started_at,
            finished_at: now_rfc3339(),
            inputs: vec![digest_file(
                &measures_path,
                measures_path.display().to_string(),
            )?],
            outputs: digest_outputs(&ctx.out_dir, &outputs)?,
            parameters: json!({
                "rolling": cfg,
                "robustness_windows": robustness_counts.iter().map(|r| r.0).collect::<Vec<_>>(),
                "aic_max": overrides.aic_max,
                "variables": variables,
                "bootstrap": "circular block, percentile interval",
            }),
            notes,
        },
    );
    manifest.write(&ctx.out_dir)?;

    Ok(SpilloverSummary {
        panel_days: panel.len(),
        variables: series.variables.clone(),
        full_total: full_snapshot.total,
        full_sam: full_snapshot.sam,
        full_stationary: model.stationary,
        windows: series.windows.len(),
        gaps: series.gaps().count(),
        mean_total: mean(series.snapshots().map(|s| s.total)),
        mean_sam: (cfg.mode == SystemMode::Signed)
            .then(|| mean(series.snapshots().filter_map(|s| s.sam))),
        h1_rejections,
        robustness: robustness_counts,
        cfg,
    })
}

// ---------------------------------------------------------------- plotdata

#[derive(Debug, Clone)]
pub struct PlotSummary {
    pub written: Vec<String>,
    pub skipped: Vec<String>,
}

impl fmt::Display for PlotSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "plotdata: wrote {}", self.written.join(", "))?;
        for s in &self.skipped {
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

struct RollingTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl RollingTable {
    fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SpillError::Io {
            stage: "plotdata",
            path: path.to_path_buf(),
            source,
        })?;
        let mut lines = text.lines();
        let header: Vec<String> = lines
            .next()
            .unwrap_or_default()
            .split(',')
            .map(str::to_string)
            .collect();
        if header.first().map(String::as_str) != Some("window_end")
            || !header.iter().any(|h| h == "total")
        {
            return Err(SpillError::Malformed {
                stage: "plotdata",
                path: path.to_path_buf(),
                line: 1,
                msg: "not a rolling.csv header".into(),
            });
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row: Vec<String> = line.split(',').map(str::to_string).collect();
            if row.len() != header.len() {
                return Err(SpillError::Malformed {
                    stage: "plotdata",
                    path: path.to_path_buf(),
                    line: i + 2,
                    msg: format!("expected {} fields, found {}", header.len(), row.len()),
                });
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Assets named by `net_<asset>` columns.
    fn net_assets(&self) -> Vec<(String, usize)> {
        self.header
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.strip_prefix("net_").map(|a| (a.to_string(), i)))
            .collect()
    }

    /// Assets named by `dsam_<asset>` columns followed by their bounds.
    fn dsam_assets(&self) -> Vec<(String, usize)> {
        let h = &self.header;
        (0..h.len().saturating_sub(2))
            .filter_map(|i| {
                let a = h[i].strip_prefix("dsam_")?;
                (h[i + 1] == format!("{}_lo", h[i]) && h[i + 2] == format!("{}_hi", h[i]))
                    .then(|| (a.to_string(), i))
            })
            .collect()
    }
}

pub fn cmd_plotdata(ctx: &RunContext) -> Result<PlotSummary> {
    let started_at = now_rfc3339();
    let rolling_path = ctx.out_dir.join("rolling.csv");
    let table = RollingTable::read(&rolling_path)?;
    let signed = table.col("sam").is_some();
    let total_col = table.col("total").expect("checked on read");

    let mut written: Vec<String> = Vec::new();
    let mut skipped = Vec::new();
    let put = |name: &str, text: String, written: &mut Vec<String>| -> Result<()> {
        write_text("plotdata", &ctx.out_dir.join(name), &text)?;
        written.push(name.to_string());
        Ok(())
    };
    let skip = |name: &str, why: &str, skipped: &mut Vec<String>| -> Result<()> {
        remove_if_present("plotdata", &ctx.out_dir.join(name))?;
        skipped.push(format!("{name} absent: {why}"));
        Ok(())
    };

    let mut total = String::from("window_end,total\n");
    for r in &table.rows {
        total.push_str(&format!("{},{}\n", r[0], r[total_col]));
    }
    put("fig_total.csv", total, &mut written)?;

    if signed {
        skip(
            "fig_net.csv",
            "signed-mode run has no FROM or net columns",
            &mut skipped,
        )?;
        let (s, lo, hi) = (
            table.col("sam").expect("signed"),
            table.col("sam_lo"),
            table.col("sam_hi"),
        );
        let mut sam = String::from("window_end,sam,lo,hi\n");
        for r in &table.rows {
            let cell = |c: Option<usize>| c.map(|c| r[c].as_str()).unwrap_or("");
            sam.push_str(&format!("{},{},{},{}\n", r[0], r[s], cell(lo), cell(hi)));
        }
        put("fig_sam.csv", sam, &mut written)?;

        let mut dsam = String::from("window_end,asset,good_to,bad_to,net,lo,hi\n");
        let assets = table.dsam_assets();
        let mut cols = Vec::with_capacity(assets.len());
        for (a, i) in &assets {
            let good = table.col(&format!("to_{a}_pos"));
            let bad = table.col(&format!("to_{a}_neg"));
            let (Some(good), Some(bad)) = (good, bad) else {
                return Err(SpillError::Malformed {
                    stage: "plotdata",
                    path: rolling_path.clone(),
                    line: 1,
                    msg: format!("missing to_{a}_pos or to_{a}_neg"),
                });
            };
            cols.push((a, good, bad, *i));
        }
        for r in &table.rows {
            for (a, good, bad, i) in &cols {
                dsam.push_str(&format!(
                    "{},{a},{},{},{},{},{}\n",
                    r[0],
                    r[*good],
                    r[*bad],
                    r[*i],
                    r[i + 1],
                    r[i + 2]
                ));
            }
        }
        put("fig_dsam.csv", dsam, &mut written)?;
    } else {
        let mut net = String::from("window_end,asset,net\n");
        let assets = table.net_assets();
        for r in &table.rows {
            for (a, i) in &assets {
                net.push_str(&format!("{},{a},{}\n", r[0], r[*i]));
            }
        }
        put("fig_net.csv", net, &mut written)?;
        skip("fig_sam.csv", "plain-mode run", &mut skipped)?;
        skip("fig_dsam.csv", "plain-mode run", &mut skipped)?;
    }

    let mut manifest = ctx.manifest()?;
    manifest.record(
        "plotdata",
        StageRecord {
            started_at,
            finished_at: now_rfc3339(),
            inputs: vec![digest_file(&rolling_path, "rolling.csv")?],
            outputs: digest_outputs(
                &ctx.out_dir,
                &written.iter().map(PathBuf::from).collect::<Vec<_>>(),
            )?,
            parameters: json!({ "mode": if signed { "signed" } else { "plain" } }),
            notes: skipped.clone(),
        },
    );
    manifest.write(&ctx.out_dir)?;
    Ok(PlotSummary { written, skipped })
}

// ---------------------------------------------------------------- all

/// `ingest`, `measures`, `spillover` and `plotdata` in sequence. Without
/// configured assets the first two stages are skipped and the spillover stage
/// reads the configured measures file.
pub fn cmd_all(ctx: &RunContext, overrides: &SpilloverOverrides) -> Result<String> {
    let mut out = String::new();
    if !ctx.config.config.assets.is_empty() {
        out.push_str(&cmd_ingest(ctx)?.to_string());
        out.push_str(&cmd_measures(ctx)?.to_string());
    }
    out.push_str(&cmd_spillover(ctx, overrides)?.to_string());
    out.push_str(&cmd_plotdata(ctx)?.to_string());
    Ok(out)
}
