//! Regularized projection depth by random projections.
//!
//! A sample's depth function is approximated in two stages. First, `L`
//! directions drawn uniformly from the unit sphere give the projection MADs
//! whose empirical `u`-quantile is the regularization threshold `beta_hat`.
//! Second, `M` fresh directions are drawn from the same distribution
//! conditioned on `MAD >= beta_hat` (by rejection). The depth of `x` is
//! `min_m (1 + O_m(x))^-1`, where `O_m` is the Stahel-Donoho outlyingness of
//! `x` along the m-th accepted direction.
//!
//! Pool slot `m` draws from its own substream `(seed, POOL, m)`, so the pool
//! is the same however the slots are scheduled, and the first `M'` slots of a
//! pool of size `M` form the pool of size `M'`.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::DepthConfig;
use crate::error::{FdError, Result};
use crate::functional::{dot, fill_direction, project_into, Direction, FunctionalSample, Grid, GridFunction};
use crate::rng::{substream, tags};
use crate::robust::{median_mad_with, quantile_rank};

fn check_sample(sample: &FunctionalSample) -> Result<()> {
    if sample.len() < 2 {
        return Err(FdError::Structural(format!("projection depth needs at least 2 curves, got {}", sample.len())));
    }
    Ok(())
}

fn check_u(u: f64) -> Result<()> {
    if !(0.0..1.0).contains(&u) {
        return Err(FdError::Domain(format!("quantile level must lie in [0, 1), got {u}")));
    }
    Ok(())
}

/// Projection MADs of the sample along `count` directions drawn from `rng`.
fn projection_mads<R: Rng + ?Sized>(sample: &FunctionalSample, count: usize, rng: &mut R) -> Vec<f64> {
    let t = sample.grid().len();
    let n = sample.len();
    let mut dir = vec![0.0; t];
    let mut proj = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    (0..count)
        .map(|_| {
            fill_direction(&mut dir, rng);
            project_into(sample, &dir, &mut proj);
            median_mad_with(&proj, &mut scratch).1
        })
        .collect()
}

fn quantile_of(mads: &[f64], u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let mut sorted = mads.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    sorted[quantile_rank(sorted.len(), u) - 1]
}

/// Regularization threshold: the empirical `u`-quantile of the projection MADs
/// along `l` random directions.
pub fn estimate_beta<R: Rng + ?Sized>(sample: &FunctionalSample, u: f64, l: usize, rng: &mut R) -> Result<f64> {
    check_sample(sample)?;
    check_u(u)?;
    if l == 0 {
        return Err(FdError::Domain("at least one direction is needed to estimate beta".into()));
    }
    Ok(quantile_of(&projection_mads(sample, l, rng), u))
}

/// Outlyingness `|<x, v> - median| / mad` given the projected median and MAD.
pub fn outlyingness(x: &GridFunction, median: f64, mad: f64, v: &Direction) -> Result<f64> {
    if !(mad > 0.0) {
        return Err(FdError::Domain(format!("outlyingness needs a positive MAD, got {mad}")));
    }
    if !crate::functional::same_grid(x.grid(), v.grid()) {
        return Err(FdError::Structural("grid mismatch between curve and direction".into()));
    }
    let proj = dot(x.values(), v.values()) / x.len() as f64;
    Ok((proj - median).abs() / mad)
}

/// Accepted directions together with the projected medians and MADs of the
/// reference sample.
#[derive(Debug, Clone)]
pub struct DirectionPool {
    grid: Arc<Grid>,
    directions: Vec<f64>,
    medians: Vec<f64>,
    mads: Vec<f64>,
    beta_hat: f64,
    draws: usize,
    config: DepthConfig,
}

struct Slot {
    direction: Vec<f64>,
    median: f64,
    mad: f64,
    draws: usize,
    projections: Option<Vec<f64>>,
}

fn fill_slot(
    sample: &FunctionalSample,
    beta: f64,
    config: &DepthConfig,
    slot: usize,
    keep: bool,
) -> std::result::Result<Slot, usize> {
    let n = sample.len();
    let mut rng = substream(config.seed, &[tags::POOL, slot as u64]);
    let mut direction = vec![0.0; sample.grid().len()];
    let mut proj = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    for draw in 1..=config.rejection_cap {
        fill_direction(&mut direction, &mut rng);
        project_into(sample, &direction, &mut proj);
        let (median, mad) = median_mad_with(&proj, &mut scratch);
        // Directions with zero MAD carry no scale information and are never accepted.
        if mad >= beta && mad > 0.0 {
            return Ok(Slot { direction, median, mad, draws: draw, projections: keep.then_some(proj) });
        }
    }
    Err(config.rejection_cap)
}

fn mad_summary(mads: &[f64]) -> String {
    if mads.is_empty() {
        return "no MADs observed".into();
    }
    let mut s = mads.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let zeros = s.iter().filter(|&&m| m == 0.0).count();
    format!(
        "estimation MADs: min {:.3e}, median {:.3e}, max {:.3e}, {} of {} zero",
        s[0],
        s[s.len() / 2],
        s[s.len() - 1],
        zeros,
        s.len()
    )
}

impl DirectionPool {
    /// Estimate `beta_hat` and draw the `M` accepted directions.
    pub fn build(sample: &FunctionalSample, config: &DepthConfig) -> Result<DirectionPool> {
        Ok(Self::build_inner(sample, config, false)?.0)
    }

    /// Build the pool and, in the same pass, the depth of every sample curve.
    pub fn build_with_sample_depths(
        sample: &FunctionalSample,
        config: &DepthConfig,
    ) -> Result<(DirectionPool, Vec<f64>)> {
        let (pool, depths) = Self::build_inner(sample, config, true)?;
        Ok((pool, depths.expect("projections were kept")))
    }

    fn build_inner(
        sample: &FunctionalSample,
        config: &DepthConfig,
        keep: bool,
    ) -> Result<(DirectionPool, Option<Vec<f64>>)> {
        check_sample(sample)?;
        config.validate()?;
        let mut beta_rng = substream(config.seed, &[tags::BETA]);
        let mads = projection_mads(sample, config.beta_directions, &mut beta_rng);
        let beta_hat = quantile_of(&mads, config.u);

        let slots: Vec<_> =
            (0..config.pool_directions).into_par_iter().map(|m| fill_slot(sample, beta_hat, config, m, keep)).collect();

        let failed = slots.iter().filter(|s| s.is_err()).count();
        if failed > 0 {
            let draws = slots
                .iter()
                .map(|s| match s {
                    Ok(s) => s.draws,
                    Err(d) => *d,
                })
                .sum();
            return Err(FdError::Infeasible {
                u: config.u,
                beta: beta_hat,
                accepted: config.pool_directions - failed,
                requested: config.pool_directions,
                draws,
                summary: mad_summary(&mads),
            });
        }

        let t = sample.grid().len();
        let m = config.pool_directions;
        let mut directions = Vec::with_capacity(m * t);
        let mut medians = Vec::with_capacity(m);
        let mut pool_mads = Vec::with_capacity(m);
        let mut draws = 0;
        let mut max_out = keep.then(|| vec![0.0f64; sample.len()]);
        for slot in slots.into_iter().map(|s| s.unwrap_or_else(|_| unreachable!())) {
            if let (Some(acc), Some(proj)) = (max_out.as_mut(), slot.projections.as_ref()) {
                for (a, p) in acc.iter_mut().zip(proj) {
                    let o = (p - slot.median).abs() / slot.mad;
                    if o > *a {
                        *a = o;
                    }
                }
            }
            directions.extend_from_slice(&slot.direction);
            medians.push(slot.median);
            pool_mads.push(slot.mad);
            draws += slot.draws;
        }
        let pool = DirectionPool {
            grid: Arc::clone(sample.grid()),
            directions,
            medians,
            mads: pool_mads,
            beta_hat,
            draws,
            config: config.clone(),
        };
        let depths = max_out.map(|o| o.into_iter().map(|o| 1.0 / (1.0 + o)).collect());
        Ok((pool, depths))
    }

    pub fn len(&self) -> usize {
        self.medians.len()
    }

    pub fn is_empty(&self) -> bool {
        self.medians.is_empty()
    }

    pub fn beta_hat(&self) -> f64 {
        self.beta_hat
    }

    pub fn medians(&self) -> &[f64] {
        &self.medians
    }

    pub fn mads(&self) -> &[f64] {
        &self.mads
    }

    pub fn config(&self) -> &DepthConfig {
        &self.config
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Total number of candidate directions drawn to fill the pool.
    pub fn total_draws(&self) -> usize {
        self.draws
    }

    /// Fraction of drawn candidates that were accepted.
    pub fn acceptance_rate(&self) -> f64 {
        self.len() as f64 / self.draws as f64
    }

    pub fn direction(&self, m: usize) -> Direction {
        let t = self.grid.len();
        let values = self.directions[m * t..(m + 1) * t].to_vec();
        Direction::normalize(GridFunction::from_parts_unchecked(Arc::clone(&self.grid), values))
            .expect("pool directions have unit norm")
    }

    fn check(&self, x: &GridFunction) -> Result<()> {
        if crate::functional::same_grid(&self.grid, x.grid()) {
            Ok(())
        } else {
            Err(FdError::Structural("curve is not on the grid of the direction pool".into()))
        }
    }

    #[inline]
    fn outlyingness_at(&self, x: &[f64], m: usize) -> f64 {
        let t = self.grid.len();
        let proj = dot(x, &self.directions[m * t..(m + 1) * t]) / t as f64;
        (proj - self.medians[m]).abs() / self.mads[m]
    }

    /// Depth using only the first `m` pool directions.
    pub fn depth_prefix(&self, x: &GridFunction, m: usize) -> Result<f64> {
        self.check(x)?;
        if m == 0 || m > self.len() {
            return Err(FdError::Domain(format!("prefix size {m} outside 1..={}", self.len())));
        }
        let max_out = (0..m).map(|k| self.outlyingness_at(x.values(), k)).fold(0.0, f64::max);
        Ok(1.0 / (1.0 + max_out))
    }

    pub fn depth(&self, x: &GridFunction) -> Result<f64> {
        self.depth_prefix(x, self.len())
    }

    /// Depth after each prefix size in `checkpoints` (which must be increasing).
    pub fn depth_trace(&self, x: &GridFunction, checkpoints: &[usize]) -> Result<Vec<f64>> {
        self.check(x)?;
        if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FdError::Domain("checkpoints must be strictly increasing".into()));
        }
        if checkpoints.first() == Some(&0) || checkpoints.last().is_some_and(|&m| m > self.len()) {
            return Err(FdError::Domain(format!("checkpoints must lie in 1..={}", self.len())));
        }
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut max_out = 0.0f64;
        let mut done = 0;
        for &c in checkpoints {
            for k in done..c {
                max_out = max_out.max(self.outlyingness_at(x.values(), k));
            }
            done = c;
            out.push(1.0 / (1.0 + max_out));
        }
        Ok(out)
    }

    /// Depth of many curves; evaluated in parallel, order preserved.
    pub fn depths(&self, xs: &[GridFunction]) -> Result<Vec<f64>> {
        xs.par_iter().map(|x| self.depth(x)).collect()
    }
}

/// Depth of `x` with respect to the pool's reference sample.
pub fn rpd(x: &GridFunction, pool: &DirectionPool) -> Result<f64> {
    pool.depth(x)
}

pub fn build_pool(sample: &FunctionalSample, config: &DepthConfig) -> Result<DirectionPool> {
    DirectionPool::build(sample, config)
}
