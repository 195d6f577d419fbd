//! Generalized forecast-error variance decomposition.
//!
//! Entry `(i, j)` of the raw decomposition is the share of the `H`-step
//! forecast error variance of variable `i` attributable to shocks in variable
//! `j`, allowing correlated shocks:
//!
//! ```text
//! ω_ij = σ_jj⁻¹ Σ_h (e_i' Ψ_h Σ e_j)²  /  Σ_h (e_i' Ψ_h Σ Ψ_h' e_i)
//! ```
//!
//! Rows of the raw matrix need not sum to one, so each entry is divided by
//! its row sum.

use nalgebra::DMatrix;

use crate::error::{Result, SpillError};
use crate::var::MaCoefficients;

#[derive(Debug, Clone, PartialEq)]
pub struct FevdMatrix {
    pub dim: usize,
    pub horizon: usize,
    pub raw: DMatrix<f64>,
    pub normalized: DMatrix<f64>,
}

impl FevdMatrix {
    /// Wraps an already row-normalized matrix (raw is set to the same values).
    pub fn from_normalized(normalized: DMatrix<f64>) -> Result<Self> {
        let (r, c) = normalized.shape();
        if r != c || r == 0 {
            return Err(SpillError::InvalidArgument(format!(
                "FEVD must be square and non-empty, got {r}x{c}"
            )));
        }
        Ok(Self {
            dim: r,
            horizon: 0,
            raw: normalized.clone(),
            normalized,
        })
    }

    /// Applies the same permutation to rows and columns: new variable `a` is
    /// old variable `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let k = self.dim;
        let p = |m: &DMatrix<f64>| DMatrix::from_fn(k, k, |i, j| m[(perm[i], perm[j])]);
        Self {
            dim: k,
            horizon: self.horizon,
            raw: p(&self.raw),
            normalized: p(&self.normalized),
        }
    }
}

/// Generalized FEVD at horizon `H` from MA coefficients and the residual
/// covariance.
pub fn gfevd(ma: &MaCoefficients, sigma: &DMatrix<f64>, horizon: usize) -> Result<FevdMatrix> {
    if horizon == 0 {
        return Err(SpillError::InvalidArgument(
            "horizon must be at least 1".into(),
        ));
    }
    if ma.psi.len() < horizon {
        return Err(SpillError::InvalidArgument(format!(
            "{} MA coefficients supplied for horizon {horizon}",
            ma.psi.len()
        )));
    }
    let k = sigma.nrows();
    if sigma.ncols() != k || ma.psi[0].shape() != (k, k) {
        return Err(SpillError::InvalidArgument(
            "dimension mismatch between Ψ and Σ".into(),
        ));
    }
    for j in 0..k {
        let s = sigma[(j, j)];
        if !(s > 0.0) {
            return Err(SpillError::NonPositiveVariance { index: j, value: s });
        }
    }

    let mut numer = DMatrix::<f64>::zeros(k, k);
    let mut denom = vec![0.0f64; k];
    for psi in &ma.psi[..horizon] {
        let a = psi * sigma;
        numer += a.map(|v| v * v);
        let b = &a * psi.transpose();
        for (i, d) in denom.iter_mut().enumerate() {
            *d += b[(i, i)];
        }
    }

    let mut raw = numer;
    for j in 0..k {
        let inv = 1.0 / sigma[(j, j)];
        raw.column_mut(j).scale_mut(inv);
    }
    for (i, &d) in denom.iter().enumerate() {
        if !(d > 0.0) {
            return Err(SpillError::ZeroRowSum { index: i });
        }
        raw.row_mut(i).unscale_mut(d);
    }

    let mut normalized = raw.clone();
    for i in 0..k {
        let s: f64 = normalized.row(i).sum();
        if !(s > 0.0) || !s.is_finite() {
            return Err(SpillError::ZeroRowSum { index: i });
        }
        normalized.row_mut(i).unscale_mut(s);
    }

    Ok(FevdMatrix {
        dim: k,
        horizon,
        raw,
        normalized,
    })
}

/// Writes the normalized decomposition (in percent) with row and column labels.
pub fn write_fevd_csv(fevd: &FevdMatrix, labels: &[String], path: &std::path::Path) -> Result<()> {
    let mut out = String::from("variable");
    for l in labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    for (i, l) in labels.iter().enumerate() {
        out.push_str(l);
        for j in 0..fevd.dim {
            out.push_str(&format!(",{}", 100.0 * fevd.normalized[(i, j)]));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|source| SpillError::Io {
        stage: "spillover",
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::random_stable_phi;
    use crate::var::ma_from_phi;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn static_ma(k: usize, h: usize) -> MaCoefficients {
        let mut psi = vec![DMatrix::identity(k, k)];
        psi.extend((1..h).map(|_| DMatrix::zeros(k, k)));
        MaCoefficients { psi }
    }

    pub(crate) fn random_spd<R: Rng>(k: usize, rng: &mut R) -> DMatrix<f64> {
        let a = DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
        &a * a.transpose() + DMatrix::identity(k, k) * 0.1
    }

    /// Loop-level evaluation of the decomposition, no matrix products.
    fn brute_gfevd(psi: &[DMatrix<f64>], sigma: &DMatrix<f64>, h_max: usize) -> DMatrix<f64> {
        let k = sigma.nrows();
        let mut out = DMatrix::zeros(k, k);
        for i in 0..k {
            let mut den = 0.0;
            for h in 0..h_max {
                for a in 0..k {
                    for b in 0..k {
                        den += psi[h][(i, a)] * sigma[(a, b)] * psi[h][(i, b)];
                    }
                }
            }
            for j in 0..k {
                let mut num = 0.0;
                for h in 0..h_max {
                    let mut inner = 0.0;
                    for a in 0..k {
                        inner += psi[h][(i, a)] * sigma[(a, j)];
                    }
                    num += inner * inner;
                }
                out[(i, j)] = num / sigma[(j, j)] / den;
            }
        }
        for i in 0..k {
            let mut s = 0.0;
            for j in 0..k {
                s += out[(i, j)];
            }
            for j in 0..k {
                out[(i, j)] /= s;
            }
        }
        out
    }

    #[test]
    fn orthogonal_static_system_is_identity() {
        for h in [1, 5, 10] {
            let f = gfevd(&static_ma(3, h), &DMatrix::identity(3, 3), h).unwrap();
            assert_eq!(f.raw, DMatrix::identity(3, 3));
            assert_eq!(f.normalized, DMatrix::identity(3, 3));
        }
    }

    #[test]
    fn correlated_static_system_by_hand() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let f = gfevd(&static_ma(2, 1), &sigma, 1).unwrap();
        let raw = DMatrix::from_row_slice(2, 2, &[1.0, 0.25, 0.25, 1.0]);
        let norm = DMatrix::from_row_slice(2, 2, &[0.8, 0.2, 0.2, 0.8]);
        assert!((&f.raw - raw).amax() <= 1e-12);
        assert!((&f.normalized - norm).amax() <= 1e-12);
    }

    #[test]
    fn matches_loop_oracle_on_random_var1() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let phi = random_stable_phi(3, 1, &mut rng);
            let sigma = random_spd(3, &mut rng);
            let ma = ma_from_phi(&phi, 10).unwrap();
            let f = gfevd(&ma, &sigma, 10).unwrap();
            let oracle = brute_gfevd(&ma.psi, &sigma, 10);
            assert!((&f.normalized - oracle).amax() <= 1e-10);
        }
    }

    #[test]
    fn rows_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let phi = random_stable_phi(5, 2, &mut rng);
        let sigma = random_spd(5, &mut rng);
        let f = gfevd(&ma_from_phi(&phi, 10).unwrap(), &sigma, 10).unwrap();
        for i in 0..5 {
            assert!((f.normalized.row(i).sum() - 1.0).abs() <= 1e-10);
        }
        assert!((f.normalized.sum() - 5.0).abs() <= 1e-8);
        assert!(f.raw.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn permutation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let phi = random_stable_phi(4, 2, &mut rng);
        let sigma = random_spd(4, &mut rng);
        let perm = [2usize, 0, 3, 1];
        let pm = |m: &DMatrix<f64>| DMatrix::from_fn(4, 4, |i, j| m[(perm[i], perm[j])]);
        let f = gfevd(&ma_from_phi(&phi, 10).unwrap(), &sigma, 10).unwrap();
        let phi_p: Vec<_> = phi.iter().map(pm).collect();
        let g = gfevd(&ma_from_phi(&phi_p, 10).unwrap(), &pm(&sigma), 10).unwrap();
        assert!((&g.normalized - f.permuted(&perm).normalized).amax() <= 1e-12);
    }

    #[test]
    fn denominators_grow_with_horizon() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let phi = random_stable_phi(3, 2, &mut rng);
        let sigma = random_spd(3, &mut rng);
        let ma = ma_from_phi(&phi, 15).unwrap();
        let mut prev = vec![0.0; 3];
        for h in 1..=15 {
            let mut den = vec![0.0; 3];
            for psi in &ma.psi[..h] {
                let b = psi * &sigma * psi.transpose();
                for i in 0..3 {
                    den[i] += b[(i, i)];
                }
            }
            for i in 0..3 {
                assert!(den[i] >= prev[i]);
            }
            prev = den;
            let f = gfevd(&ma, &sigma, h).unwrap();
            assert!(f.normalized.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn error_paths() {
        let mut sigma = DMatrix::identity(2, 2);
        sigma[(1, 1)] = 0.0;
        assert!(matches!(
            gfevd(&static_ma(2, 1), &sigma, 1),
            Err(SpillError::NonPositiveVariance { index: 1, .. })
        ));
        assert!(gfevd(&static_ma(2, 1), &DMatrix::identity(2, 2), 3).is_err());
        assert!(gfevd(&static_ma(2, 1), &DMatrix::identity(2, 2), 0).is_err());
    }

    #[test]
    fn zero_variance_row_is_named() {
        // Ψ_0 row of zeros gives a zero denominator for variable 0
        let mut psi0 = DMatrix::identity(2, 2);
        psi0[(0, 0)] = 0.0;
        let ma = MaCoefficients { psi: vec![psi0] };
        assert!(matches!(
            gfevd(&ma, &DMatrix::identity(2, 2), 1),
            Err(SpillError::ZeroRowSum { index: 0 })
        ));
    }
}
