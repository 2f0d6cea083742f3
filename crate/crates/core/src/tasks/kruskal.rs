use statrs::function::gamma::gamma_ur;

use crate::error::{FdError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KwResult {
    /// Tie-corrected Kruskal-Wallis statistic.
    pub statistic: f64,
    pub df: usize,
    /// Upper tail of the chi-square distribution with `df` degrees of freedom.
    pub p_value: f64,
    pub reject_at_5pct: bool,
}

/// Mid-ranks (1-based) and the tie term `sum (t^3 - t)` over tie groups.
fn mid_ranks(values: &[f64]) -> (Vec<f64>, f64) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut ties = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let mid = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mid;
        }
        let t = (end - start) as f64;
        ties += t * t * t - t;
        start = end;
    }
    (ranks, ties)
}

/// Kruskal-Wallis test on pooled values; `group_sizes` splits `values` into
/// consecutive groups.
pub fn kw_test(values: &[f64], group_sizes: &[usize]) -> Result<KwResult> {
    if group_sizes.len() < 2 || group_sizes.contains(&0) {
        return Err(FdError::Structural(format!("need at least two nonempty groups, got sizes {group_sizes:?}")));
    }
    let total: usize = group_sizes.iter().sum();
    if total != values.len() {
        return Err(FdError::Structural(format!("group sizes sum to {total}, but {} values were given", values.len())));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(FdError::Domain(format!("non-finite value {bad} in Kruskal-Wallis input")));
    }
    let n = total as f64;
    let (ranks, ties) = mid_ranks(values);
    let correction = 1.0 - ties / (n * n * n - n);
    if correction <= 0.0 {
        return Err(FdError::Numerical("all observations are tied; the Kruskal-Wallis statistic is undefined".into()));
    }
    let mut offset = 0;
    let mut sum = 0.0;
    for &size in group_sizes {
        let r: f64 = ranks[offset..offset + size].iter().sum();
        sum += r * r / size as f64;
        offset += size;
    }
    let statistic = ((12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction).max(0.0);
    let df = group_sizes.len() - 1;
    let p_value = if statistic == 0.0 { 1.0 } else { gamma_ur(df as f64 / 2.0, statistic / 2.0).clamp(0.0, 1.0) };
    Ok(KwResult { statistic, df, p_value, reject_at_5pct: p_value < 0.05 })
}
