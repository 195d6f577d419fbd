//! C ABI over the spillnet estimators.
//!
//! Matrices cross the boundary as row-major `double` buffers. Fitted models
//! and decompositions are opaque handles released with their `_free`
//! function. Every fallible call returns a [`SpillStatus`]; the message for
//! the last failure on the calling thread is available from
//! [`spill_last_error`].

use std::cell::RefCell;
use std::ffi::CString;
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::{c_char, size_t};
use nalgebra::DMatrix;

use spillnet::connectedness::{
    directional_from, directional_sam, directional_to, directional_to_signed, net_spillover, sam,
    total_spillover,
};
use spillnet::realized::realized_semivariances;
use spillnet::var::{fit_var, ma_coefficients, ma_from_phi};
use spillnet::{gfevd, BlockOrder, FevdMatrix, SpillError, SystemLayout, VarModel};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpillStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    NumericalError = 4,
    Panic = 5,
}

/// Position of the positive-semivariance block in a signed system.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpillBlockOrder {
    PositiveFirst = 0,
    NegativeFirst = 1,
}

/// Fitted VAR(p) model.
pub struct SpillVar {
    model: VarModel,
}

/// Generalized variance decomposition.
pub struct SpillFevd {
    fevd: FevdMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &SpillError) -> SpillStatus {
    match e.exit_code() {
        2 => SpillStatus::InvalidArgument,
        3 => SpillStatus::DataError,
        _ => SpillStatus::NumericalError,
    }
}

enum Failure {
    Null(&'static str),
    Spill(SpillError),
}

impl From<SpillError> for Failure {
    fn from(e: SpillError) -> Self {
        Failure::Spill(e)
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Spill(SpillError::InvalidArgument(msg.into()))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SpillStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SpillStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            SpillStatus::NullPointer
        }
        Ok(Err(Failure::Spill(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            SpillStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_slice<'a>(
    p: *mut f64,
    len: usize,
    what: &'static str,
) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn write_out(p: *mut f64, v: f64, what: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    *p = v;
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

fn copy_row_major(m: &DMatrix<f64>, out: &mut [f64]) {
    let c = m.ncols();
    for i in 0..m.nrows() {
        for j in 0..c {
            out[i * c + j] = m[(i, j)];
        }
    }
}

fn layout(
    fevd: &FevdMatrix,
    n_assets: usize,
    order: SpillBlockOrder,
) -> Result<SystemLayout, Failure> {
    let order = match order {
        SpillBlockOrder::PositiveFirst => BlockOrder::PositiveFirst,
        SpillBlockOrder::NegativeFirst => BlockOrder::NegativeFirst,
    };
    let l = SystemLayout::signed(n_assets, order);
    if n_assets == 0 || l.dim() != fevd.dim {
        return Err(invalid(format!(
            "{n_assets} assets do not form a signed system of dimension {}",
            fevd.dim
        )));
    }
    Ok(l)
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn spill_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Realized variance and semivariances of `n` intraday returns.
///
/// # Safety
/// `returns` must point to `n` doubles; the outputs must be valid or null
/// (null outputs are an error).
#[no_mangle]
pub unsafe extern "C" fn spill_realized_semivariances(
    returns: *const f64,
    n: size_t,
    rv: *mut f64,
    rs_neg: *mut f64,
    rs_pos: *mut f64,
) -> SpillStatus {
    guard(|| {
        let r = slice(returns, n, "returns")?;
        let (neg, pos) = realized_semivariances(r)?;
        write_out(rv, neg + pos, "rv")?;
        write_out(rs_neg, neg, "rs_neg")?;
        write_out(rs_pos, pos, "rs_pos")
    })
}

/// Fits a VAR(`lags`) with intercept to a `rows × cols` row-major data block.
///
/// # Safety
/// `data` must point to `rows * cols` doubles and `out` to writable storage
/// for one handle.
#[no_mangle]
pub unsafe extern "C" fn spill_var_fit(
    data: *const f64,
    rows: size_t,
    cols: size_t,
    lags: size_t,
    out: *mut *mut SpillVar,
) -> SpillStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = std::ptr::null_mut();
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| invalid("rows × cols overflows"))?;
        if cols == 0 {
            return Err(invalid("data has no columns"));
        }
        let d = slice(data, len, "data")?;
        let window = DMatrix::from_row_slice(rows, cols, d);
        let model = fit_var(&window, lags)?;
        *out = Box::into_raw(Box::new(SpillVar { model }));
        Ok(())
    })
}

/// # Safety
/// `var` must come from [`spill_var_fit`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spill_var_free(var: *mut SpillVar) {
    if !var.is_null() {
        drop(Box::from_raw(var));
    }
}

/// Number of variables `k`; 0 for a null handle.
///
/// # Safety
/// `var` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spill_var_dim(var: *const SpillVar) -> size_t {
    var.as_ref().map_or(0, |v| v.model.dim)
}

/// Lag order `p`; 0 for a null handle.
///
/// # Safety
/// `var` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spill_var_lag_order(var: *const SpillVar) -> size_t {
    var.as_ref().map_or(0, |v| v.model.lag_order)
}

/// Copies `Φ_lag` (`lag` in `1..=p`) into `out` as `k × k` row-major.
///
/// # Safety
/// `var` must be a live handle and `out` must hold `k * k` doubles.
#[no_mangle]
pub unsafe extern "C" fn spill_var_phi(
    var: *const SpillVar,
    lag: size_t,
    out: *mut f64,
) -> SpillStatus {
    guard(|| {
        let v = &deref(var, "var")?.model;
        if lag == 0 || lag > v.lag_order {
            return Err(invalid(format!("lag {lag} outside 1..={}", v.lag_order)));
        }
        copy_row_major(&v.phi[lag - 1], out_slice(out, v.dim * v.dim, "out")?);
        Ok(())
    })
}

/// Copies the residual covariance into `out` as `k × k` row-major.
///
/// # Safety
/// `var` must be a live handle and `out` must hold `k * k` doubles.
#[no_mangle]
pub unsafe extern "C" fn spill_var_sigma(var: *const SpillVar, out: *mut f64) -> SpillStatus {
    guard(|| {
        let v = &deref(var, "var")?.model;
        copy_row_major(&v.sigma_eps, out_slice(out, v.dim * v.dim, "out")?);
        Ok(())
    })
}

/// Copies the intercept (`k` values) into `out`.
///
/// # Safety
/// `var` must be a live handle and `out` must hold `k` doubles.
#[no_mangle]
pub unsafe extern "C" fn spill_var_intercept(var: *const SpillVar, out: *mut f64) -> SpillStatus {
    guard(|| {
        let v = &deref(var, "var")?.model;
        out_slice(out, v.dim, "out")?.copy_from_slice(&v.intercept);
        Ok(())
    })
}

/// Spectral radius of the companion matrix; the model is stationary when it
/// is below one.
///
/// # Safety
/// `var` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spill_var_spectral_radius(
    var: *const SpillVar,
    out: *mut f64,
) -> SpillStatus {
    guard(|| {
        let v = &deref(var, "var")?.model;
        write_out(out, v.spectral_radius, "out")
    })
}

fn into_handle(out: *mut *mut SpillFevd, fevd: FevdMatrix) {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(SpillFevd { fevd })) };
}

/// Decomposition at `horizon` for a fitted model.
///
/// # Safety
/// `var` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spill_gfevd_from_var(
    var: *const SpillVar,
    horizon: size_t,
    out: *mut *mut SpillFevd,
) -> SpillStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = std::ptr::null_mut();
        let v = &deref(var, "var")?.model;
        let ma = ma_coefficients(v, horizon)?;
        into_handle(out, gfevd(&ma, &v.sigma_eps, horizon)?);
        Ok(())
    })
}

/// Decomposition at `horizon` from `p` stacked `k × k` row-major coefficient
/// matrices (`Φ_1` first) and a `k × k` row-major covariance.
///
/// # Safety
/// `phi` must hold `p * k * k` doubles, `sigma` `k * k`, and `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn spill_gfevd(
    phi: *const f64,
    k: size_t,
    p: size_t,
    sigma: *const f64,
    horizon: size_t,
    out: *mut *mut SpillFevd,
) -> SpillStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = std::ptr::null_mut();
        if k == 0 || p == 0 {
            return Err(invalid("k and p must be positive"));
        }
        let kk = k.checked_mul(k).ok_or_else(|| invalid("k × k overflows"))?;
        let all = slice(phi, kk * p, "phi")?;
        let phi: Vec<DMatrix<f64>> = all
            .chunks(kk)
            .map(|c| DMatrix::from_row_slice(k, k, c))
            .collect();
        let sigma = DMatrix::from_row_slice(k, k, slice(sigma, kk, "sigma")?);
        let ma = ma_from_phi(&phi, horizon)?;
        into_handle(out, gfevd(&ma, &sigma, horizon)?);
        Ok(())
    })
}

/// # Safety
/// `fevd` must come from a `spill_gfevd*` call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spill_fevd_free(fevd: *mut SpillFevd) {
    if !fevd.is_null() {
        drop(Box::from_raw(fevd));
    }
}

/// System dimension; 0 for a null handle.
///
/// # Safety
/// `fevd` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn spill_fevd_dim(fevd: *const SpillFevd) -> size_t {
    fevd.as_ref().map_or(0, |f| f.fevd.dim)
}

/// Copies the row-normalized decomposition (fractions, rows sum to one) into
/// `out` as `k × k` row-major.
///
/// # Safety
/// `fevd` must be a live handle and `out` must hold `k * k` doubles.
#[no_mangle]
pub unsafe extern "C" fn spill_fevd_normalized(
    fevd: *const SpillFevd,
    out: *mut f64,
) -> SpillStatus {
    guard(|| {
        let f = &deref(fevd, "fevd")?.fevd;
        copy_row_major(&f.normalized, out_slice(out, f.dim * f.dim, "out")?);
        Ok(())
    })
}

/// Total spillover index in percent.
///
/// # Safety
/// `fevd` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spill_total(fevd: *const SpillFevd, out: *mut f64) -> SpillStatus {
    guard(|| write_out(out, total_spillover(&deref(fevd, "fevd")?.fevd), "out"))
}

unsafe fn indexed(
    fevd: *const SpillFevd,
    i: size_t,
    out: *mut f64,
    f: fn(&FevdMatrix, usize) -> f64,
) -> SpillStatus {
    guard(|| {
        let m = &deref(fevd, "fevd")?.fevd;
        if i >= m.dim {
            return Err(invalid(format!("variable {i} outside 0..{}", m.dim)));
        }
        write_out(out, f(m, i), "out")
    })
}

/// Spillover transmitted by variable `i` (0-based) to all others, percent.
///
/// # Safety
/// `fevd` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spill_to(fevd: *const SpillFevd, i: size_t, out: *mut f64) -> SpillStatus {
    indexed(fevd, i, out, directional_to)
}

/// Spillover received by variable `i` (0-based) from all others, percent.
///
/// # Safety
/// `fevd` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spill_from(
    fevd: *const SpillFevd,
    i: size_t,
    out: *mut f64,
) -> SpillStatus {
    indexed(fevd, i, out, directional_from)
}

/// TO minus FROM for variable `i` (0-based).
///
/// # Safety
/// `fevd` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spill_net(
    fevd: *const SpillFevd,
    i: size_t,
    out: *mut f64,
) -> SpillStatus {
    indexed(fevd, i, out, net_spillover)
}

/// Signed-system TO for column `col` (0-based), excluding the diagonal and
/// the same asset's opposite-sign entry.
///
/// # Safety
/// `fevd` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spill_signed_to(
    fevd: *const SpillFevd,
    n_assets: size_t,
    order: SpillBlockOrder,
    col: size_t,
    out: *mut f64,
) -> SpillStatus {
    guard(|| {
        let f = &deref(fevd, "fevd")?.fevd;
        let l = layout(f, n_assets, order)?;
        if col >= l.dim() {
            return Err(invalid(format!("column {col} outside 0..{}", l.dim())));
        }
        write_out(out, directional_to_signed(f, &l, col)?, "out")
    })
}

/// Spillover asymmetry measure: good-volatility TO minus bad-volatility TO.
///
/// # Safety
/// `fevd` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spill_sam(
    fevd: *const SpillFevd,
    n_assets: size_t,
    order: SpillBlockOrder,
    out: *mut f64,
) -> SpillStatus {
    guard(|| {
        let f = &deref(fevd, "fevd")?.fevd;
        let l = layout(f, n_assets, order)?;
        write_out(out, sam(f, &l)?, "out")
    })
}

/// Directional asymmetry for asset `i` (0-based).
///
/// # Safety
/// `fevd` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spill_dsam(
    fevd: *const SpillFevd,
    n_assets: size_t,
    order: SpillBlockOrder,
    i: size_t,
    out: *mut f64,
) -> SpillStatus {
    guard(|| {
        let f = &deref(fevd, "fevd")?.fevd;
        let l = layout(f, n_assets, order)?;
        if i >= n_assets {
            return Err(invalid(format!("asset {i} outside 0..{n_assets}")));
        }
        write_out(out, directional_sam(f, &l, i)?, "out")
    })
}
