//! Univariate robust statistics: median, MAD and the inf-type empirical quantile.

use std::cmp::Ordering;

use crate::error::{FdError, Result};

fn cmp_f64(a: &f64, b: &f64) -> Ordering {
    a.partial_cmp(b).expect("robust statistics require non-NaN input")
}

fn check_input(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(FdError::Structural("empty input".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(FdError::Domain("non-finite input".into()));
    }
    Ok(())
}

/// Median of a nonempty buffer, reordering it in place.
///
/// Odd length: the middle order statistic. Even length: midpoint of the two
/// central order statistics.
pub(crate) fn median_in_place(buf: &mut [f64]) -> f64 {
    let n = buf.len();
    let mid = n / 2;
    let (left, upper, _) = buf.select_nth_unstable_by(mid, cmp_f64);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = left.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Median and MAD of `values`, using `scratch` (same length) as workspace.
pub(crate) fn median_mad_with(values: &[f64], scratch: &mut [f64]) -> (f64, f64) {
    scratch.copy_from_slice(values);
    let med = median_in_place(scratch);
    for (s, v) in scratch.iter_mut().zip(values) {
        *s = (v - med).abs();
    }
    (med, median_in_place(scratch))
}

pub fn sample_median(values: &[f64]) -> Result<f64> {
    check_input(values)?;
    Ok(median_in_place(&mut values.to_vec()))
}

/// Median absolute deviation from the sample median (unscaled).
pub fn sample_mad(values: &[f64]) -> Result<f64> {
    check_input(values)?;
    let mut scratch = vec![0.0; values.len()];
    Ok(median_mad_with(values, &mut scratch).1)
}

/// Left-continuous empirical quantile `inf { x : F_n(x) >= u }`, i.e. the
/// `ceil(u * n)`-th order statistic for `u > 0`, and `0` for `u = 0`.
pub fn empirical_quantile(values: &[f64], u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(FdError::Domain(format!("quantile level must lie in [0, 1), got {u}")));
    }
    check_input(values)?;
    if u == 0.0 {
        return Ok(0.0);
    }
    let k = quantile_rank(values.len(), u);
    let mut buf = values.to_vec();
    let (_, kth, _) = buf.select_nth_unstable_by(k - 1, cmp_f64);
    Ok(*kth)
}

/// 1-based rank `ceil(u * n)` used by [`empirical_quantile`], clamped to `1..=n`.
///
/// A tolerance of 1e-9 absorbs products such as `0.1 * 1000` that land just
/// above an integer in floating point.
pub(crate) fn quantile_rank(n: usize, u: f64) -> usize {
    let raw = (u * n as f64 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(n)
}
