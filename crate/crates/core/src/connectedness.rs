//! Spillover indices computed from a row-normalized FEVD.
//!
//! Indices are percentages. Variable and asset indices are zero-based.
//!
//! In a signed system of `N` assets the `2N` variables form two blocks of
//! semivariances. Directional TO spillovers there skip the main diagonal and
//! the two off-block diagonals (`|row − col| = N`), which pair an asset's
//! good and bad volatility with each other.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpillError};
use crate::fevd::FevdMatrix;
use crate::realized::{BlockOrder, SystemMode};

/// How the variables of a system map onto assets and signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemLayout {
    pub n_assets: usize,
    pub mode: SystemMode,
    pub block_order: BlockOrder,
}

impl SystemLayout {
    pub fn plain(n_assets: usize) -> Self {
        Self {
            n_assets,
            mode: SystemMode::Plain,
            block_order: BlockOrder::PositiveFirst,
        }
    }

    pub fn signed(n_assets: usize, block_order: BlockOrder) -> Self {
        Self {
            n_assets,
            mode: SystemMode::Signed,
            block_order,
        }
    }

    pub fn dim(&self) -> usize {
        match self.mode {
            SystemMode::Plain => self.n_assets,
            SystemMode::Signed => 2 * self.n_assets,
        }
    }

    /// Column of asset `i`'s positive semivariance.
    pub fn positive_col(&self, i: usize) -> usize {
        match self.block_order {
            BlockOrder::PositiveFirst => i,
            BlockOrder::NegativeFirst => self.n_assets + i,
        }
    }

    /// Column of asset `i`'s negative semivariance.
    pub fn negative_col(&self, i: usize) -> usize {
        match self.block_order {
            BlockOrder::PositiveFirst => self.n_assets + i,
            BlockOrder::NegativeFirst => i,
        }
    }

    fn check(&self, fevd: &FevdMatrix, want: SystemMode) -> Result<()> {
        if self.mode != want {
            return Err(SpillError::InvalidArgument(format!(
                "operation requires {want:?} mode"
            )));
        }
        if fevd.dim != self.dim() {
            return Err(SpillError::InvalidArgument(format!(
                "FEVD has dimension {} but layout expects {}",
                fevd.dim,
                self.dim()
            )));
        }
        Ok(())
    }
}

fn off_diagonal_sum(fevd: &FevdMatrix) -> f64 {
    fevd.normalized.sum() - fevd.normalized.trace()
}

/// `100 × Σ_{i≠j} ω̃_ij / k`.
pub fn total_spillover(fevd: &FevdMatrix) -> f64 {
    100.0 * off_diagonal_sum(fevd) / fevd.dim as f64
}

/// Received by variable `i`: off-diagonal row sum, scaled by `100 / k`.
pub fn directional_from(fevd: &FevdMatrix, i: usize) -> f64 {
    let k = fevd.dim;
    let s: f64 = (0..k)
        .filter(|&j| j != i)
        .map(|j| fevd.normalized[(i, j)])
        .sum();
    100.0 * s / k as f64
}

/// Transmitted by variable `i`: off-diagonal column sum, scaled by `100 / k`.
pub fn directional_to(fevd: &FevdMatrix, i: usize) -> f64 {
    let k = fevd.dim;
    let s: f64 = (0..k)
        .filter(|&j| j != i)
        .map(|j| fevd.normalized[(j, i)])
        .sum();
    100.0 * s / k as f64
}

pub fn net_spillover(fevd: &FevdMatrix, i: usize) -> f64 {
    directional_to(fevd, i) - directional_from(fevd, i)
}

/// Rows counted in the signed TO sum for column `col`.
pub fn signed_to_rows(n_assets: usize, col: usize) -> impl Iterator<Item = usize> {
    (0..2 * n_assets).filter(move |&row| row != col && row.abs_diff(col) != n_assets)
}

/// Transmitted by variable `col` of a signed system, over the `2N − 2` rows
/// left after the exclusions, scaled by `100 / 2N`.
pub fn directional_to_signed(fevd: &FevdMatrix, layout: &SystemLayout, col: usize) -> Result<f64> {
    layout.check(fevd, SystemMode::Signed)?;
    if col >= layout.dim() {
        return Err(SpillError::InvalidArgument(format!(
            "column {col} out of range"
        )));
    }
    let s: f64 = signed_to_rows(layout.n_assets, col)
        .map(|row| fevd.normalized[(row, col)])
        .sum();
    Ok(100.0 * s / layout.dim() as f64)
}

/// Good-volatility TO minus bad-volatility TO for asset `i`. Negative values
/// mean the asset's bad volatility spills over more.
pub fn directional_sam(fevd: &FevdMatrix, layout: &SystemLayout, i: usize) -> Result<f64> {
    if i >= layout.n_assets {
        return Err(SpillError::InvalidArgument(format!(
            "asset {i} out of range"
        )));
    }
    Ok(directional_to_signed(fevd, layout, layout.positive_col(i))?
        - directional_to_signed(fevd, layout, layout.negative_col(i))?)
}

/// System-wide asymmetry: total good-volatility TO minus total bad-volatility TO.
pub fn sam(fevd: &FevdMatrix, layout: &SystemLayout) -> Result<f64> {
    let mut pos = 0.0;
    let mut neg = 0.0;
    for i in 0..layout.n_assets {
        pos += directional_to_signed(fevd, layout, layout.positive_col(i))?;
        neg += directional_to_signed(fevd, layout, layout.negative_col(i))?;
    }
    Ok(pos - neg)
}

/// All indices for one estimation window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpilloverSnapshot {
    pub window_end: NaiveDate,
    pub total: f64,
    /// One entry per system variable.
    pub to: Vec<f64>,
    /// Plain mode only.
    pub from: Vec<f64>,
    /// Plain mode only, one entry per asset.
    pub net: Vec<f64>,
    /// Signed mode only.
    pub sam: Option<f64>,
    /// Signed mode only, one entry per asset.
    pub dsam: Vec<f64>,
    pub stationary: bool,
}

pub fn snapshot(
    fevd: &FevdMatrix,
    layout: &SystemLayout,
    window_end: NaiveDate,
    stationary: bool,
) -> Result<SpilloverSnapshot> {
    if fevd.dim != layout.dim() {
        return Err(SpillError::InvalidArgument(format!(
            "FEVD has dimension {} but layout expects {}",
            fevd.dim,
            layout.dim()
        )));
    }
    let k = layout.dim();
    let total = total_spillover(fevd);
    Ok(match layout.mode {
        SystemMode::Plain => SpilloverSnapshot {
            window_end,
            total,
            to: (0..k).map(|i| directional_to(fevd, i)).collect(),
            from: (0..k).map(|i| directional_from(fevd, i)).collect(),
            net: (0..k).map(|i| net_spillover(fevd, i)).collect(),
            sam: None,
            dsam: Vec::new(),
            stationary,
        },
        SystemMode::Signed => SpilloverSnapshot {
            window_end,
            total,
            to: (0..k)
                .map(|c| directional_to_signed(fevd, layout, c))
                .collect::<Result<_>>()?,
            from: Vec::new(),
            net: Vec::new(),
            sam: Some(sam(fevd, layout)?),
            dsam: (0..layout.n_assets)
                .map(|i| directional_sam(fevd, layout, i))
                .collect::<Result<_>>()?,
            stationary,
        },
    })
}

/// Full normalized decomposition (percent) bordered by a TO row, a FROM
/// column (plain mode) and the TOTAL cell.
pub fn spillover_table_csv(
    fevd: &FevdMatrix,
    layout: &SystemLayout,
    labels: &[String],
) -> Result<String> {
    let k = layout.dim();
    if labels.len() != k || fevd.dim != k {
        return Err(SpillError::InvalidArgument(
            "label count does not match system dimension".into(),
        ));
    }
    let plain = layout.mode == SystemMode::Plain;
    let mut out = String::from("variable");
    for l in labels {
        out.push(',');
        out.push_str(l);
    }
    if plain {
        out.push_str(",FROM");
    }
    out.push('\n');
    for i in 0..k {
        out.push_str(&labels[i]);
        for j in 0..k {
            out.push_str(&format!(",{}", 100.0 * fevd.normalized[(i, j)]));
        }
        if plain {
            out.push_str(&format!(",{}", directional_from(fevd, i)));
        }
        out.push('\n');
    }
    out.push_str("TO");
    for c in 0..k {
        let v = if plain {
            directional_to(fevd, c)
        } else {
            directional_to_signed(fevd, layout, c)?
        };
        out.push_str(&format!(",{v}"));
    }
    if plain {
        out.push(',');
    }
    out.push('\n');
    out.push_str(&format!("TOTAL,{}", total_spillover(fevd)));
    for _ in 1..k + usize::from(plain) {
        out.push(',');
    }
    out.push('\n');
    Ok(out)
}

pub fn write_spillover_table(
    fevd: &FevdMatrix,
    layout: &SystemLayout,
    labels: &[String],
    path: &Path,
) -> Result<()> {
    let text = spillover_table_csv(fevd, layout, labels)?;
    std::fs::write(path, text).map_err(|source| SpillError::Io {
        stage: "spillover",
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fevd(rows: usize, vals: &[f64]) -> FevdMatrix {
        FevdMatrix::from_normalized(DMatrix::from_row_slice(rows, rows, vals)).unwrap()
    }

    fn random_fevd<R: Rng>(k: usize, rng: &mut R) -> FevdMatrix {
        let mut m = DMatrix::from_fn(k, k, |_, _| rng.random::<f64>());
        for i in 0..k {
            let s = m.row(i).sum();
            m.row_mut(i).unscale_mut(s);
        }
        FevdMatrix::from_normalized(m).unwrap()
    }

    #[test]
    fn identity_has_no_spillovers() {
        let f = FevdMatrix::from_normalized(DMatrix::identity(4, 4)).unwrap();
        assert_eq!(total_spillover(&f), 0.0);
        for i in 0..4 {
            assert_eq!(directional_to(&f, i), 0.0);
            assert_eq!(directional_from(&f, i), 0.0);
            assert_eq!(net_spillover(&f, i), 0.0);
        }
        let layout = SystemLayout::signed(2, BlockOrder::PositiveFirst);
        for c in 0..4 {
            assert_eq!(directional_to_signed(&f, &layout, c).unwrap(), 0.0);
        }
        assert_eq!(sam(&f, &layout).unwrap(), 0.0);
        assert_eq!(directional_sam(&f, &layout, 1).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_two_variable_case() {
        let f = fevd(2, &[0.8, 0.2, 0.2, 0.8]);
        assert!((total_spillover(&f) - 20.0).abs() < 1e-12);
        assert!((directional_from(&f, 0) - 10.0).abs() < 1e-12);
        assert!((directional_to(&f, 0) - 10.0).abs() < 1e-12);
        assert!(net_spillover(&f, 0).abs() < 1e-12);
        assert!(net_spillover(&f, 1).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_net() {
        let f = fevd(2, &[0.7, 0.3, 0.1, 0.9]);
        assert!((net_spillover(&f, 0) + 10.0).abs() < 1e-12);
        assert!((net_spillover(&f, 1) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn signed_exclusions_for_two_assets() {
        // N = 2: column 0 skips rows 0 and 2, keeps rows 1 and 3.
        let vals: Vec<f64> = (0..16).map(|v| v as f64).collect();
        let f = fevd(4, &vals);
        let layout = SystemLayout::signed(2, BlockOrder::PositiveFirst);
        let expect = 100.0 / 4.0 * (vals[4] + vals[12]);
        assert_eq!(directional_to_signed(&f, &layout, 0).unwrap(), expect);
        assert_eq!(signed_to_rows(2, 3).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(signed_to_rows(6, 0).count(), 10);
    }

    #[test]
    fn signed_ops_reject_plain_layout() {
        let f = fevd(2, &[0.8, 0.2, 0.2, 0.8]);
        assert!(directional_to_signed(&f, &SystemLayout::plain(2), 0).is_err());
        assert!(sam(&f, &SystemLayout::signed(2, BlockOrder::PositiveFirst)).is_err());
    }

    #[test]
    fn block_order_is_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_fevd(6, &mut rng);
        let a = sam(&f, &SystemLayout::signed(3, BlockOrder::PositiveFirst)).unwrap();
        let b = sam(&f, &SystemLayout::signed(3, BlockOrder::NegativeFirst)).unwrap();
        assert!((a + b).abs() < 1e-12);
    }

    #[test]
    fn net_sums_to_zero_and_dsam_sums_to_sam() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let n = rng.random_range(1..=6);
            let f = random_fevd(n, &mut rng);
            let s: f64 = (0..n).map(|i| net_spillover(&f, i)).sum();
            assert!(s.abs() <= 1e-8);

            let g = random_fevd(2 * n, &mut rng);
            let layout = SystemLayout::signed(n, BlockOrder::PositiveFirst);
            let d: f64 = (0..n)
                .map(|i| directional_sam(&g, &layout, i).unwrap())
                .sum();
            assert!((d - sam(&g, &layout).unwrap()).abs() <= 1e-10);
        }
    }

    #[test]
    fn table_layout() {
        let f = fevd(2, &[0.8, 0.2, 0.2, 0.8]);
        let labels = vec!["AUD".to_string(), "GBP".to_string()];
        let t = spillover_table_csv(&f, &SystemLayout::plain(2), &labels).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "variable,AUD,GBP,FROM");
        let num =
            |line: &str, idx: usize| line.split(',').nth(idx).unwrap().parse::<f64>().unwrap();
        assert!((num(lines[1], 1) - 80.0).abs() < 1e-12);
        assert!((num(lines[1], 3) - 10.0).abs() < 1e-12);
        assert!(lines[3].starts_with("TO,") && lines[3].ends_with(','));
        assert!((num(lines[3], 2) - 10.0).abs() < 1e-12);
        assert!(lines[4].starts_with("TOTAL,") && lines[4].ends_with(",,"));
        assert!((num(lines[4], 1) - 20.0).abs() < 1e-12);
        for l in &lines {
            assert_eq!(l.split(',').count(), 4);
        }
    }

    #[test]
    fn signed_table_has_no_from_column() {
        let f = FevdMatrix::from_normalized(DMatrix::identity(4, 4)).unwrap();
        let labels: Vec<String> = ["A_pos", "B_pos", "A_neg", "B_neg"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let t = spillover_table_csv(
            &f,
            &SystemLayout::signed(2, BlockOrder::PositiveFirst),
            &labels,
        )
        .unwrap();
        for l in t.lines() {
            assert_eq!(l.split(',').count(), 5);
        }
    }
}
