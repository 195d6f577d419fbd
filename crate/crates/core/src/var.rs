//! VAR(p) estimation by least squares and the moving-average recursion.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Result, SpillError};

/// Relative pivot size below which a scaled regressor is treated as collinear.
const RANK_TOL: f64 = 1e-10;

/// A fitted VAR(p) with intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct VarModel {
    pub dim: usize,
    pub lag_order: usize,
    pub intercept: Vec<f64>,
    /// `phi[l]` multiplies the observation `l + 1` steps back.
    pub phi: Vec<DMatrix<f64>>,
    pub sigma_eps: DMatrix<f64>,
    pub nobs: usize,
    pub spectral_radius: f64,
    pub stationary: bool,
}

#[derive(Serialize)]
struct VarDump<'a> {
    dim: usize,
    lag_order: usize,
    nobs: usize,
    intercept: &'a [f64],
    phi: Vec<Vec<Vec<f64>>>,
    sigma: Vec<Vec<f64>>,
    spectral_radius: f64,
    stationary: bool,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

impl VarModel {
    /// Diagnostic JSON dump with `phi`, `sigma` and `stationary` fields.
    pub fn to_json(&self) -> String {
        let dump = VarDump {
            dim: self.dim,
            lag_order: self.lag_order,
            nobs: self.nobs,
            intercept: &self.intercept,
            phi: self.phi.iter().map(rows_of).collect(),
            sigma: rows_of(&self.sigma_eps),
            spectral_radius: self.spectral_radius,
            stationary: self.stationary,
        };
        serde_json::to_string_pretty(&dump).expect("plain data serializes")
    }

    /// In-sample residuals on the window the model was fitted to.
    pub fn residuals(&self, window: &DMatrix<f64>) -> DMatrix<f64> {
        let p = self.lag_order;
        let t_eff = window.nrows() - p;
        DMatrix::from_fn(t_eff, self.dim, |r, i| {
            let t = r + p;
            let mut fitted = self.intercept[i];
            for (l, phi) in self.phi.iter().enumerate() {
                for j in 0..self.dim {
                    fitted += phi[(i, j)] * window[(t - l - 1, j)];
                }
            }
            window[(t, i)] - fitted
        })
    }

    /// `kp × kp` companion matrix.
    pub fn companion(&self) -> DMatrix<f64> {
        companion_matrix(&self.phi)
    }
}

fn companion_matrix(phi: &[DMatrix<f64>]) -> DMatrix<f64> {
    let k = phi[0].nrows();
    let p = phi.len();
    let mut c = DMatrix::zeros(k * p, k * p);
    for (l, m) in phi.iter().enumerate() {
        c.view_mut((0, l * k), (k, k)).copy_from(m);
    }
    for i in 0..k * (p - 1) {
        c[(k + i, i)] = 1.0;
    }
    c
}

/// Largest eigenvalue modulus of the companion matrix.
pub fn spectral_radius(phi: &[DMatrix<f64>]) -> f64 {
    companion_matrix(phi)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Lagged regressor matrix `[1, y_{t-1}', …, y_{t-p}']` for `t = p..T`.
pub fn design_matrix(window: &DMatrix<f64>, p: usize) -> DMatrix<f64> {
    let k = window.ncols();
    let t_eff = window.nrows() - p;
    DMatrix::from_fn(t_eff, 1 + k * p, |r, c| {
        if c == 0 {
            1.0
        } else {
            let lag = (c - 1) / k + 1;
            let j = (c - 1) % k;
            window[(r + p - lag, j)]
        }
    })
}

/// Least squares `min ‖Y − XB‖` through a Householder QR of the
/// column-equilibrated regressors.
fn least_squares(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = x.ncols();
    let mut scaled = x.clone();
    let mut scale = vec![1.0; m];
    for (c, s) in scale.iter_mut().enumerate() {
        let norm = scaled.column(c).norm();
        if norm == 0.0 {
            return Err(SpillError::CollinearWindow);
        }
        *s = norm;
        scaled.column_mut(c).unscale_mut(norm);
    }
    let qr = scaled.qr();
    let r = qr.r();
    let max_pivot = r.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if r.diagonal().iter().any(|v| v.abs() <= RANK_TOL * max_pivot) {
        return Err(SpillError::CollinearWindow);
    }
    let mut qty = y.clone();
    qr.q_tr_mul(&mut qty);
    let top = qty.rows(0, m).into_owned();
    let mut b = r
        .solve_upper_triangular(&top)
        .ok_or(SpillError::CollinearWindow)?;
    for (c, s) in scale.iter().enumerate() {
        b.row_mut(c).unscale_mut(*s);
    }
    Ok(b)
}

/// Equation-by-equation least squares VAR(p) with intercept.
///
/// The residual covariance divides by the number of effective observations
/// `T − p`, with no correction for estimated parameters.
pub fn fit_var(window: &DMatrix<f64>, p: usize) -> Result<VarModel> {
    let (t, k) = window.shape();
    if p == 0 {
        return Err(SpillError::InvalidArgument(
            "lag order must be at least 1".into(),
        ));
    }
    if k == 0 {
        return Err(SpillError::InvalidArgument(
            "window has no variables".into(),
        ));
    }
    let n_regressors = 1 + k * p;
    if t <= p || t - p <= n_regressors {
        return Err(SpillError::TooFewObservations {
            needed: n_regressors + p,
            got: t,
        });
    }
    for r in 0..t {
        for c in 0..k {
            if !window[(r, c)].is_finite() {
                return Err(SpillError::NonFinite { row: r, col: c });
            }
        }
    }

    if let Some(lifted) = fit_with_duplicates(window, p)? {
        return Ok(lifted);
    }

    let x = design_matrix(window, p);
    let y = window.rows(p, t - p).into_owned();
    let b = least_squares(&x, &y)?;

    let resid = &y - &x * &b;
    let nobs = t - p;
    let mut sigma = resid.transpose() * &resid / nobs as f64;
    sigma = (&sigma + sigma.transpose()) * 0.5;
    for i in 0..k {
        if sigma[(i, i)] <= 0.0 {
            return Err(SpillError::NonPositiveVariance {
                index: i,
                value: sigma[(i, i)],
            });
        }
    }

    let intercept = b.row(0).iter().copied().collect();
    let phi: Vec<DMatrix<f64>> = (0..p).map(|l| b.rows(1 + l * k, k).transpose()).collect();
    let radius = spectral_radius(&phi);
    Ok(VarModel {
        dim: k,
        lag_order: p,
        intercept,
        phi,
        sigma_eps: sigma,
        nobs,
        spectral_radius: radius,
        stationary: radius < 1.0,
    })
}

/// Exactly repeated data columns make the regressors collinear. Such a
/// system is fitted on its distinct columns and expanded to the minimum-norm
/// least-squares solution: each copy's equation repeats the original and a
/// regressor's coefficient is split equally among its copies. Returns `None`
/// when every column is distinct.
fn fit_with_duplicates(window: &DMatrix<f64>, p: usize) -> Result<Option<VarModel>> {
    let k = window.ncols();
    let mut distinct: Vec<usize> = Vec::with_capacity(k);
    let mut slot = vec![0usize; k];
    for c in 0..k {
        match distinct
            .iter()
            .position(|&d| window.column(d) == window.column(c))
        {
            Some(s) => slot[c] = s,
            None => {
                slot[c] = distinct.len();
                distinct.push(c);
            }
        }
    }
    if distinct.len() == k {
        return Ok(None);
    }
    let mut copies = vec![0usize; distinct.len()];
    for &s in &slot {
        copies[s] += 1;
    }
    let reduced = fit_var(&window.select_columns(&distinct), p)?;
    let phi: Vec<DMatrix<f64>> = reduced
        .phi
        .iter()
        .map(|a| DMatrix::from_fn(k, k, |i, j| a[(slot[i], slot[j])] / copies[slot[j]] as f64))
        .collect();
    let radius = spectral_radius(&phi);
    Ok(Some(VarModel {
        dim: k,
        lag_order: p,
        intercept: slot.iter().map(|&s| reduced.intercept[s]).collect(),
        sigma_eps: DMatrix::from_fn(k, k, |i, j| reduced.sigma_eps[(slot[i], slot[j])]),
        phi,
        nobs: reduced.nobs,
        spectral_radius: radius,
        stationary: radius < 1.0,
    }))
}

/// Multivariate AIC for each candidate lag, all fitted on the same
/// `T − p_max` effective observations.
pub fn aic_table(window: &DMatrix<f64>, p_max: usize) -> Result<Vec<(usize, f64)>> {
    if p_max == 0 {
        return Err(SpillError::InvalidArgument(
            "p_max must be at least 1".into(),
        ));
    }
    let (t, k) = window.shape();
    if t <= p_max {
        return Err(SpillError::TooFewObservations {
            needed: p_max + 1,
            got: t,
        });
    }
    let t_eff = (t - p_max) as f64;
    (1..=p_max)
        .map(|p| {
            let start = p_max - p;
            let sub = window.rows(start, t - start).into_owned();
            let model = fit_var(&sub, p)?;
            let det = model.sigma_eps.clone().determinant();
            if det <= 0.0 || !det.is_finite() {
                return Err(SpillError::NonPositiveVariance {
                    index: 0,
                    value: det,
                });
            }
            let penalty = 2.0 * (k * k * p + k) as f64 / t_eff;
            Ok((p, det.ln() + penalty))
        })
        .collect()
}

/// Lag order in `1..=p_max` minimising the AIC; ties go to the smaller lag.
pub fn select_lag(window: &DMatrix<f64>, p_max: usize) -> Result<usize> {
    let table = aic_table(window, p_max)?;
    let mut best = table[0];
    for &(p, aic) in &table[1..] {
        if aic < best.1 {
            best = (p, aic);
        }
    }
    Ok(best.0)
}

/// Moving-average coefficients `Ψ_0..Ψ_{H−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaCoefficients {
    pub psi: Vec<DMatrix<f64>>,
}

/// `Ψ_0 = I`, `Ψ_h = Σ_{j=1}^{min(h,p)} Φ_j Ψ_{h−j}`.
pub fn ma_coefficients(model: &VarModel, horizon: usize) -> Result<MaCoefficients> {
    ma_from_phi(&model.phi, horizon)
}

pub fn ma_from_phi(phi: &[DMatrix<f64>], horizon: usize) -> Result<MaCoefficients> {
    if horizon == 0 {
        return Err(SpillError::InvalidArgument(
            "horizon must be at least 1".into(),
        ));
    }
    let k = phi
        .first()
        .map(|m| m.nrows())
        .ok_or_else(|| SpillError::InvalidArgument("no coefficient matrices".into()))?;
    let mut psi: Vec<DMatrix<f64>> = Vec::with_capacity(horizon);
    psi.push(DMatrix::identity(k, k));
    for h in 1..horizon {
        let mut next = DMatrix::zeros(k, k);
        for (j, phi_j) in phi.iter().enumerate().take(h) {
            next.gemm(1.0, phi_j, &psi[h - j - 1], 1.0);
        }
        psi.push(next);
    }
    Ok(MaCoefficients { psi })
}
