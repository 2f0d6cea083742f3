use crate::error::{FdError, Result};
use crate::functional::{same_grid, GridFunction};

/// Index of the deepest curve; the lowest index wins ties.
pub fn deepest_index(depths: &[f64]) -> Result<usize> {
    if depths.is_empty() {
        return Err(FdError::Structural("no depths to maximize".into()));
    }
    let mut best = 0;
    for (i, d) in depths.iter().enumerate().skip(1) {
        if *d > depths[best] {
            best = i;
        }
    }
    Ok(best)
}

/// The deepest-curve location estimate.
pub fn deepest_curve<'a>(curves: &'a [GridFunction], depths: &[f64]) -> Result<&'a GridFunction> {
    if curves.len() != depths.len() {
        return Err(FdError::Structural(format!("{} curves but {} depths", curves.len(), depths.len())));
    }
    Ok(&curves[deepest_index(depths)?])
}

/// Monte Carlo estimates of the error decomposition `MISE = ISB + IVAR`.
///
/// The variance uses divisor `R` so the identity is exact. The standard
/// deviations are taken over `B = min(10, R / 2)` contiguous batches of
/// replicates, each evaluated with the same plug-in formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocationMetrics {
    pub mise: f64,
    pub isb: f64,
    pub ivar: f64,
    pub mise_sd: f64,
    pub isb_sd: f64,
    pub ivar_sd: f64,
}

fn plug_in(estimates: &[GridFunction], mu: &GridFunction) -> (f64, f64, f64) {
    let t = mu.len();
    let r = estimates.len() as f64;
    let mut mean_dev = vec![0.0; t];
    let mut mise = 0.0;
    for e in estimates {
        let mut sq = 0.0;
        for ((m, x), y) in mean_dev.iter_mut().zip(e.values()).zip(mu.values()) {
            let d = x - y;
            *m += d;
            sq += d * d;
        }
        mise += sq / t as f64;
    }
    mise /= r;
    let isb = mean_dev.iter().map(|m| (m / r).powi(2)).sum::<f64>() / t as f64;
    let mut ivar = 0.0;
    for e in estimates {
        for ((m, x), y) in mean_dev.iter().zip(e.values()).zip(mu.values()) {
            ivar += (x - y - m / r).powi(2);
        }
    }
    ivar /= r * t as f64;
    (mise, isb, ivar)
}

fn batch_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

pub fn location_metrics(estimates: &[GridFunction], mu: &GridFunction) -> Result<LocationMetrics> {
    if estimates.len() < 2 {
        return Err(FdError::Structural(format!("need at least 2 replicates, got {}", estimates.len())));
    }
    for e in estimates {
        if !same_grid(e.grid(), mu.grid()) {
            return Err(FdError::Structural("replicates and the target mean live on different grids".into()));
        }
    }
    let (mise, isb, ivar) = plug_in(estimates, mu);
    let batches = (estimates.len() / 2).min(10);
    let per_batch = estimates.len() / batches;
    let parts: Vec<(f64, f64, f64)> =
        (0..batches).map(|b| plug_in(&estimates[b * per_batch..(b + 1) * per_batch], mu)).collect();
    let sd_of = |f: fn(&(f64, f64, f64)) -> f64| batch_sd(&parts.iter().map(f).collect::<Vec<_>>());
    Ok(LocationMetrics { mise, isb, ivar, mise_sd: sd_of(|p| p.0), isb_sd: sd_of(|p| p.1), ivar_sd: sd_of(|p| p.2) })
}
