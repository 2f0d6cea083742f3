//! Functional depths: the regularized projection depth and four baselines.

mod baseline;
mod rpd;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use baseline::{depth_fd, depth_id, depth_mbd, depth_sd, SortedColumns, SphericalReference};
pub use rpd::{build_pool, estimate_beta, outlyingness, rpd, DirectionPool};

use crate::error::{FdError, Result};
use crate::functional::{FunctionalSample, GridFunction};

/// Tuning of the random-projection approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthConfig {
    /// Quantile level of the projection-MAD distribution used as threshold.
    pub u: f64,
    /// Directions used to estimate the threshold (`L`).
    pub beta_directions: usize,
    /// Accepted directions used to evaluate depth (`M`).
    pub pool_directions: usize,
    pub seed: u64,
    /// Maximum candidate draws per accepted direction.
    pub rejection_cap: usize,
}

impl Default for DepthConfig {
    fn default() -> Self {
        DepthConfig { u: 0.1, beta_directions: 1000, pool_directions: 10_000, seed: 0, rejection_cap: 1000 }
    }
}

impl DepthConfig {
    pub fn with_u(u: f64) -> Self {
        DepthConfig { u, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.u) {
            return Err(FdError::Domain(format!("quantile level must lie in [0, 1), got {}", self.u)));
        }
        if self.beta_directions == 0 || self.pool_directions == 0 {
            return Err(FdError::Domain("direction budgets L and M must be positive".into()));
        }
        if self.rejection_cap == 0 {
            return Err(FdError::Domain("rejection cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Which depth to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepthMethod {
    /// Regularized projection depth at quantile level `u`.
    Rpd {
        u: f64,
    },
    Fd,
    Mbd,
    Id,
    Sd,
}

impl fmt::Display for DepthMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepthMethod::Rpd { u } => write!(f, "RPD_{u}"),
            DepthMethod::Fd => f.write_str("FD"),
            DepthMethod::Mbd => f.write_str("MBD"),
            DepthMethod::Id => f.write_str("ID"),
            DepthMethod::Sd => f.write_str("SD"),
        }
    }
}

impl FromStr for DepthMethod {
    type Err = FdError;

    /// Accepts `fd`, `mbd`, `id`, `sd` and `rpd:<u>` / `rpd_<u>` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let method = match lower.as_str() {
            "fd" => DepthMethod::Fd,
            "mbd" => DepthMethod::Mbd,
            "id" => DepthMethod::Id,
            "sd" => DepthMethod::Sd,
            other => {
                let u = other
                    .strip_prefix("rpd:")
                    .or_else(|| other.strip_prefix("rpd_"))
                    .or_else(|| other.strip_prefix("rpd="))
                    .ok_or_else(|| FdError::Config(format!("unknown depth method '{s}'")))?;
                let u: f64 = u.parse().map_err(|_| FdError::Config(format!("invalid quantile level in '{s}'")))?;
                if !(0.0..1.0).contains(&u) {
                    return Err(FdError::Config(format!("quantile level in '{s}' must lie in [0, 1)")));
                }
                DepthMethod::Rpd { u }
            }
        };
        Ok(method)
    }
}

impl DepthMethod {
    /// Deterministic depths do not consume random streams.
    pub fn is_random(&self) -> bool {
        matches!(self, DepthMethod::Rpd { .. })
    }
}

/// Depth of each curve of a sample, with the method that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthVector {
    pub values: Vec<f64>,
    pub method: DepthMethod,
    /// Random-projection settings, present for RPD only.
    pub config: Option<DepthConfig>,
}

impl DepthVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A depth function fitted to a reference sample, ready for repeated queries.
#[derive(Debug, Clone)]
pub enum FittedDepth {
    Rpd(DirectionPool),
    Integrated(SortedColumns),
    Infimal(SortedColumns),
    ModifiedBand(SortedColumns),
    Spherical(SphericalReference),
}

impl FittedDepth {
    /// Fit `method` to `reference`. `config` supplies `L`, `M`, seed and cap
    /// for RPD; its `u` is overridden by the method's own level.
    pub fn fit(reference: &FunctionalSample, method: DepthMethod, config: &DepthConfig) -> Result<Self> {
        Ok(match method {
            DepthMethod::Rpd { u } => {
                FittedDepth::Rpd(DirectionPool::build(reference, &DepthConfig { u, ..config.clone() })?)
            }
            DepthMethod::Fd => FittedDepth::Integrated(SortedColumns::new(reference)),
            DepthMethod::Id => FittedDepth::Infimal(SortedColumns::new(reference)),
            DepthMethod::Mbd => {
                require_pairs(reference)?;
                FittedDepth::ModifiedBand(SortedColumns::new(reference))
            }
            DepthMethod::Sd => {
                require_pairs(reference)?;
                FittedDepth::Spherical(SphericalReference::new(reference))
            }
        })
    }

    fn grid_len(&self) -> Option<usize> {
        match self {
            FittedDepth::Rpd(pool) => Some(pool.grid().len()),
            _ => None,
        }
    }

    pub fn depth(&self, x: &GridFunction) -> Result<f64> {
        if let FittedDepth::Rpd(pool) = self {
            return pool.depth(x);
        }
        let v = x.values();
        Ok(match self {
            FittedDepth::Integrated(c) => c.integrated(v),
            FittedDepth::Infimal(c) => c.infimal(v),
            FittedDepth::ModifiedBand(c) => c.modified_band(v),
            FittedDepth::Spherical(r) => r.depth(v),
            FittedDepth::Rpd(_) => unreachable!(),
        })
    }

    /// Depths of many curves, evaluated in parallel with the order preserved.
    pub fn depths(&self, xs: &[GridFunction]) -> Result<Vec<f64>> {
        debug_assert!(self.grid_len().is_none_or(|t| xs.iter().all(|x| x.len() == t)));
        xs.par_iter().map(|x| self.depth(x)).collect()
    }
}

fn require_pairs(sample: &FunctionalSample) -> Result<()> {
    if sample.len() < 2 {
        return Err(FdError::Structural(format!("pair-based depths need at least 2 curves, got {}", sample.len())));
    }
    Ok(())
}

/// Depth of every curve of `sample` with respect to `sample` itself.
///
/// For RPD a single direction pool is built and the sample depths are
/// accumulated in the same pass.
pub fn depth_sample(sample: &FunctionalSample, method: DepthMethod, config: &DepthConfig) -> Result<DepthVector> {
    let (values, config) = match method {
        DepthMethod::Rpd { u } => {
            let cfg = DepthConfig { u, ..config.clone() };
            let (_, values) = DirectionPool::build_with_sample_depths(sample, &cfg)?;
            (values, Some(cfg))
        }
        _ => (FittedDepth::fit(sample, method, config)?.depths(sample.curves())?, None),
    };
    Ok(DepthVector { values, method, config })
}

/// Depths of `queries` with respect to `reference`.
pub fn depth_against(
    reference: &FunctionalSample,
    queries: &[GridFunction],
    method: DepthMethod,
    config: &DepthConfig,
) -> Result<Vec<f64>> {
    for q in queries {
        reference.check_grid(q)?;
    }
    FittedDepth::fit(reference, method, config)?.depths(queries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::Grid;

    #[test]
    fn method_round_trip() {
        for s in ["fd", "MBD", "id", "sd", "rpd:0.001", "RPD_0.5", "rpd=0.1"] {
            let m: DepthMethod = s.parse().unwrap();
            let again: DepthMethod = m.to_string().parse().unwrap();
            assert_eq!(m, again);
        }
        assert!("rpd:1.0".parse::<DepthMethod>().is_err());
        assert!("halfspace".parse::<DepthMethod>().is_err());
        assert_eq!(DepthMethod::Rpd { u: 0.001 }.to_string(), "RPD_0.001");
    }

    #[test]
    fn single_curve_fd_is_one() {
        let g = Grid::uniform(5).unwrap();
        let s = FunctionalSample::new(vec![GridFunction::from_fn(&g, |t| t * t)]).unwrap();
        let d = depth_sample(&s, DepthMethod::Fd, &DepthConfig::default()).unwrap();
        assert_eq!(d.values, vec![1.0]);
        assert!(d.config.is_none());
    }

    #[test]
    fn config_validation() {
        assert!(DepthConfig::default().validate().is_ok());
        assert!(DepthConfig { u: 1.0, ..Default::default() }.validate().is_err());
        assert!(DepthConfig { pool_directions: 0, ..Default::default() }.validate().is_err());
        assert!(DepthConfig { rejection_cap: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn rpd_sample_depths_are_deterministic() {
        let g = Grid::uniform(11).unwrap();
        let s = FunctionalSample::from_rows(
            &g,
            (0..12).map(|i| (0..11).map(|k| ((i * 7 + k * 3) % 11) as f64 * 0.3).collect()).collect(),
        )
        .unwrap();
        let cfg = DepthConfig { beta_directions: 100, pool_directions: 200, seed: 5, ..Default::default() };
        let a = depth_sample(&s, DepthMethod::Rpd { u: 0.1 }, &cfg).unwrap();
        let b = depth_sample(&s, DepthMethod::Rpd { u: 0.1 }, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.config.as_ref().unwrap().u, 0.1);
        assert!(a.values.iter().all(|&d| d > 0.0 && d <= 1.0));
    }
}
