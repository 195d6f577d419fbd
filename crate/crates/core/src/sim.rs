//! Synthetic data generators: Gaussian VAR(p) paths and a stochastic-volatility
//! model producing daily realized semivariance panels.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::realized::{realized_semivariances, DailyMeasures, MeasurePanel};

/// Simulates `t` observations of `y_t = c + Σ Φ_l y_{t−l} + ε_t`,
/// `ε_t ~ N(0, Σ)`, discarding `burn` initial draws.
pub fn simulate_var<R: Rng + ?Sized>(
    phi: &[DMatrix<f64>],
    intercept: &[f64],
    sigma: &DMatrix<f64>,
    t: usize,
    burn: usize,
    rng: &mut R,
) -> DMatrix<f64> {
    let k = intercept.len();
    let chol = sigma
        .clone()
        .cholesky()
        .expect("innovation covariance must be positive definite")
        .l();
    let p = phi.len();
    let total = t + burn + p;
    let mut y = DMatrix::zeros(total, k);
    let mut z = nalgebra::DVector::zeros(k);
    for s in p..total {
        for v in z.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let eps = &chol * &z;
        for i in 0..k {
            let mut v = intercept[i] + eps[i];
            for (l, m) in phi.iter().enumerate() {
                for j in 0..k {
                    v += m[(i, j)] * y[(s - l - 1, j)];
                }
            }
            y[(s, i)] = v;
        }
    }
    y.rows(burn + p, t).into_owned()
}

/// Random coefficient matrices rescaled so the companion spectral radius is
/// at most 0.8.
pub fn random_stable_phi<R: Rng + ?Sized>(k: usize, p: usize, rng: &mut R) -> Vec<DMatrix<f64>> {
    let mut phi: Vec<DMatrix<f64>> = (0..p)
        .map(|_| DMatrix::from_fn(k, k, |_, _| rng.random_range(-0.5..0.5)))
        .collect();
    let target: f64 = rng.random_range(0.3..0.8);
    // Scaling Φ_l by c^l scales every companion eigenvalue by c.
    let radius = crate::var::spectral_radius(&phi);
    if radius > 0.0 {
        let c = target / radius;
        for (l, m) in phi.iter_mut().enumerate() {
            *m *= c.powi(l as i32 + 1);
        }
    }
    phi
}

/// Stochastic-volatility model for daily semivariances.
///
/// Log daily variance of asset `i` is `mu + loading_i f_t + u_it`, with `f`
/// and `u_i` independent Gaussian AR(1) processes. Each day draws
/// `intraday_steps` returns with random sign; down moves are scaled by
/// `exp(downside_loading_i f_t / 2)`, so all-zero downside loadings give a
/// model that is symmetric between good and bad volatility.
#[derive(Debug, Clone)]
pub struct SemivarianceDgp {
    pub assets: Vec<String>,
    pub intraday_steps: usize,
    pub mu: f64,
    pub factor_persistence: f64,
    pub idio_persistence: f64,
    pub factor_vol: f64,
    pub idio_vol: f64,
    pub loadings: Vec<f64>,
    pub downside_loadings: Vec<f64>,
}

impl SemivarianceDgp {
    pub fn symmetric(n_assets: usize) -> Self {
        let assets = (0..n_assets).map(|i| format!("A{}", i + 1)).collect();
        Self {
            assets,
            intraday_steps: 78,
            mu: (5e-5f64).ln(),
            factor_persistence: 0.95,
            idio_persistence: 0.8,
            factor_vol: 0.25,
            idio_vol: 0.3,
            loadings: vec![1.0; n_assets],
            downside_loadings: vec![0.0; n_assets],
        }
    }

    pub fn with_assets(mut self, names: &[&str]) -> Self {
        assert_eq!(names.len(), self.assets.len());
        self.assets = names.iter().map(|s| s.to_string()).collect();
        self
    }

    /// Simulates `days` consecutive weekdays starting at `start`.
    pub fn simulate<R: Rng + ?Sized>(
        &self,
        start: NaiveDate,
        days: usize,
        rng: &mut R,
    ) -> MeasurePanel {
        let n = self.assets.len();
        let burn = 200;
        let stat_f = self.factor_vol / (1.0 - self.factor_persistence.powi(2)).sqrt();
        let stat_u = self.idio_vol / (1.0 - self.idio_persistence.powi(2)).sqrt();
        let mut f = stat_f * rng.sample::<f64, _>(StandardNormal);
        let mut u = vec![0.0; n];
        for ui in u.iter_mut() {
            *ui = stat_u * rng.sample::<f64, _>(StandardNormal);
        }
        let dates = weekdays(start, days);
        let mut rows = Vec::with_capacity(days);
        let mut returns = vec![0.0; self.intraday_steps];
        for step in 0..burn + days {
            f = self.factor_persistence * f
                + self.factor_vol * rng.sample::<f64, _>(StandardNormal);
            for ui in u.iter_mut() {
                *ui = self.idio_persistence * *ui
                    + self.idio_vol * rng.sample::<f64, _>(StandardNormal);
            }
            let mut row = Vec::with_capacity(n);
            for i in 0..n {
                let var = (self.mu + self.loadings[i] * f + u[i]).exp();
                let sd = (var / self.intraday_steps as f64).sqrt();
                let down = (0.5 * self.downside_loadings[i] * f).exp();
                for r in returns.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *r = if z < 0.0 { sd * down * z } else { sd * z };
                }
                if step >= burn {
                    let (rs_neg, rs_pos) = realized_semivariances(&returns).expect("non-empty");
                    row.push(DailyMeasures {
                        trading_day: dates[step - burn],
                        rv: rs_neg + rs_pos,
                        rs_neg,
                        rs_pos,
                    });
                }
            }
            if step >= burn {
                rows.push(row);
            }
        }
        MeasurePanel::from_rows(self.assets.clone(), dates, rows)
            .expect("rectangular by construction")
    }
}

/// The bundled six-currency fixture: 300 weekdays from 2008-01-02 with
/// downside loadings that make bad volatility the stronger transmitter.
pub fn fixture_panel() -> MeasurePanel {
    let mut dgp =
        SemivarianceDgp::symmetric(6).with_assets(&["AUD", "GBP", "CAD", "EUR", "JPY", "CHF"]);
    dgp.loadings = vec![1.2, 0.9, 1.0, 0.8, 1.1, 0.7];
    dgp.downside_loadings = vec![0.6, 0.2, 0.4, 0.3, 0.5, 0.1];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2008);
    dgp.simulate(
        NaiveDate::from_ymd_opt(2008, 1, 2).expect("valid date"),
        300,
        &mut rng,
    )
}

/// `count` consecutive Monday–Friday dates from `start` (inclusive).
pub fn weekdays(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(count);
    let mut d = start;
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d += Duration::days(1);
    }
    out
}
