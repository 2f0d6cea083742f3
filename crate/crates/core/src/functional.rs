//! Discretized L2([0,1]) geometry: grids, curves, samples and unit directions.
//!
//! Functions live on an equidistant grid `t_k = (k-1)/(T-1)`, `k = 1..T`. The
//! inner product is the Riemann sum `(1/T) * sum_k x(t_k) y(t_k)`, so that
//! `norm(x)^2 == inner_product(x, x)` with `norm(x) = sqrt(sum_k x(t_k)^2 / T)`.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{FdError, Result};

/// Equidistant grid on [0, 1] including both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn uniform(len: usize) -> Result<Arc<Grid>> {
        if len < 2 {
            return Err(FdError::Domain(format!("grid needs at least 2 points, got {len}")));
        }
        let step = 1.0 / (len - 1) as f64;
        let points = (0..len).map(|k| k as f64 * step).collect();
        Ok(Arc::new(Grid { points }))
    }

    /// Validate an explicit list of grid points (e.g. a CSV header).
    pub fn from_points(points: Vec<f64>) -> Result<Arc<Grid>> {
        let len = points.len();
        if len < 2 {
            return Err(FdError::Domain(format!("grid needs at least 2 points, got {len}")));
        }
        if points[0].abs() > 1e-12 || (points[len - 1] - 1.0).abs() > 1e-12 {
            return Err(FdError::Domain(format!("grid must span [0, 1], got [{}, {}]", points[0], points[len - 1])));
        }
        let step = 1.0 / (len - 1) as f64;
        for (k, w) in points.windows(2).enumerate() {
            let gap = w[1] - w[0];
            if gap <= 0.0 || ((gap - step) / step).abs() > 1e-6 {
                return Err(FdError::Domain(format!("grid is not equidistant between points {} and {}", k + 1, k + 2)));
            }
        }
        // Snap to the canonical points so that grids parsed from text compare equal.
        Grid::uniform(len)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

pub(crate) fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || a.points == b.points
}

fn check_grids(a: &Arc<Grid>, b: &Arc<Grid>) -> Result<()> {
    if same_grid(a, b) {
        Ok(())
    } else {
        Err(FdError::Structural(format!("grid mismatch: {} vs {} points", a.len(), b.len())))
    }
}

/// Plain dot product with four independent accumulators.
///
/// The summation order is fixed, so results are bit-reproducible.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let chunks = a.len() / 4;
    let (mut s0, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
    for c in 0..chunks {
        let i = 4 * c;
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (s0 + s1) + (s2 + s3) + tail
}

/// One functional observation sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FdError::Structural(format!(
                "curve has {} values but the grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(FdError::Domain(format!("non-finite value at grid point {}", k + 1)));
        }
        Ok(GridFunction { grid, values })
    }

    /// Evaluate `f` at every grid point.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().iter().map(|&t| f(t)).collect();
        GridFunction { grid: Arc::clone(grid), values }
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        GridFunction { grid: Arc::clone(grid), values: vec![value; grid.len()] }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        (dot(&self.values, &self.values) / self.values.len() as f64).sqrt()
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: f64, other: &GridFunction) -> Result<GridFunction> {
        check_grids(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + factor * b).collect();
        Ok(GridFunction { grid: Arc::clone(&self.grid), values })
    }

    pub fn scale(&self, factor: f64) -> GridFunction {
        GridFunction { grid: Arc::clone(&self.grid), values: self.values.iter().map(|v| v * factor).collect() }
    }

    pub(crate) fn from_parts_unchecked(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        GridFunction { grid, values }
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Discrete inner product `(1/T) sum_k x(t_k) y(t_k)`.
pub fn inner_product(x: &GridFunction, y: &GridFunction) -> Result<f64> {
    check_grids(&x.grid, &y.grid)?;
    Ok(dot(&x.values, &y.values) / x.values.len() as f64)
}

/// A sample of `n >= 1` curves sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    grid: Arc<Grid>,
    curves: Vec<GridFunction>,
}

impl FunctionalSample {
    pub fn new(curves: Vec<GridFunction>) -> Result<Self> {
        let first = curves.first().ok_or_else(|| FdError::Structural("a sample needs at least one curve".into()))?;
        let grid = Arc::clone(&first.grid);
        for (i, c) in curves.iter().enumerate() {
            if !same_grid(&grid, &c.grid) {
                return Err(FdError::Structural(format!("curve {} is on a different grid", i + 1)));
            }
        }
        Ok(FunctionalSample { grid, curves })
    }

    pub fn from_rows(grid: &Arc<Grid>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let curves = rows.into_iter().map(|r| GridFunction::new(Arc::clone(grid), r)).collect::<Result<Vec<_>>>()?;
        Self::new(curves)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn curves(&self) -> &[GridFunction] {
        &self.curves
    }

    pub fn curve(&self, i: usize) -> &GridFunction {
        &self.curves[i]
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn into_curves(self) -> Vec<GridFunction> {
        self.curves
    }

    /// Concatenate two samples on the same grid (first `self`, then `other`).
    pub fn concat(&self, other: &FunctionalSample) -> Result<FunctionalSample> {
        check_grids(&self.grid, &other.grid)?;
        let mut curves = self.curves.clone();
        curves.extend(other.curves.iter().cloned());
        Ok(FunctionalSample { grid: Arc::clone(&self.grid), curves })
    }

    /// Apply `f` to every curve.
    pub fn map(&self, f: impl Fn(&GridFunction) -> GridFunction) -> Result<FunctionalSample> {
        FunctionalSample::new(self.curves.iter().map(f).collect())
    }

    pub(crate) fn check_grid(&self, x: &GridFunction) -> Result<()> {
        check_grids(&self.grid, &x.grid)
    }
}

/// A unit vector in the discrete norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction(GridFunction);

impl Direction {
    /// Normalize a nonzero function to unit discrete norm.
    pub fn normalize(f: GridFunction) -> Result<Direction> {
        let norm = f.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(FdError::Domain("cannot normalize a zero function".into()));
        }
        Ok(Direction(f.scale(1.0 / norm)))
    }

    pub fn as_function(&self) -> &GridFunction {
        &self.0
    }

    pub fn values(&self) -> &[f64] {
        &self.0.values
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.0.grid
    }
}

/// Fill `out` with a direction drawn uniformly from the unit sphere of R^T
/// (standard normal coordinates rescaled to unit discrete norm).
pub(crate) fn fill_direction<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    let t = out.len() as f64;
    loop {
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let sq = dot(out, out);
        if sq > f64::MIN_POSITIVE {
            let scale = (t / sq).sqrt();
            out.iter_mut().for_each(|v| *v *= scale);
            return;
        }
    }
}

pub fn sample_direction<R: Rng + ?Sized>(grid: &Arc<Grid>, rng: &mut R) -> Direction {
    let mut values = vec![0.0; grid.len()];
    fill_direction(&mut values, rng);
    Direction(GridFunction { grid: Arc::clone(grid), values })
}

/// Projections `<X_i, v>` of every curve in the sample.
pub fn project(sample: &FunctionalSample, v: &Direction) -> Result<Vec<f64>> {
    check_grids(&sample.grid, v.grid())?;
    Ok(project_raw(sample, v.values()))
}

pub(crate) fn project_raw(sample: &FunctionalSample, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; sample.len()];
    project_into(sample, v, &mut out);
    out
}

pub(crate) fn project_into(sample: &FunctionalSample, v: &[f64], out: &mut [f64]) {
    let t = v.len() as f64;
    for (o, c) in out.iter_mut().zip(&sample.curves) {
        *o = dot(&c.values, v) / t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn grid(t: usize) -> Arc<Grid> {
        Grid::uniform(t).unwrap()
    }

    #[test]
    fn constant_inner_products() {
        for t in [2, 5, 101] {
            let g = grid(t);
            let one = GridFunction::constant(&g, 1.0);
            let zero = GridFunction::zeros(&g);
            let y = GridFunction::from_fn(&g, |s| s * s - 3.0);
            assert_eq!(inner_product(&one, &one).unwrap(), 1.0);
            assert_eq!(inner_product(&zero, &y).unwrap(), 0.0);
        }
    }

    #[test]
    fn sine_norm_is_close_to_one() {
        let g = grid(101);
        let x = GridFunction::from_fn(&g, |t| 2f64.sqrt() * (2.0 * std::f64::consts::PI * t).sin());
        let ip = inner_product(&x, &x).unwrap();
        assert!((ip - 1.0).abs() < 0.02, "{ip}");
        assert!((x.norm() * x.norm() - ip).abs() < 1e-14);
    }

    #[test]
    fn grid_mismatch_is_structural() {
        let a = GridFunction::zeros(&grid(5));
        let b = GridFunction::zeros(&grid(6));
        assert!(matches!(inner_product(&a, &b), Err(FdError::Structural(_))));
        // Equal points on distinct allocations are compatible.
        let c = GridFunction::zeros(&grid(5));
        assert!(inner_product(&a, &c).is_ok());
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::uniform(1).is_err());
        assert!(Grid::from_points(vec![0.0, 0.5, 1.0]).is_ok());
        assert!(Grid::from_points(vec![0.0, 0.3, 1.0]).is_err());
        assert!(Grid::from_points(vec![0.1, 0.5, 1.0]).is_err());
        assert!(GridFunction::new(grid(3), vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(GridFunction::new(grid(3), vec![0.0, 1.0]).is_err());
        assert!(FunctionalSample::new(vec![]).is_err());
    }

    #[test]
    fn projections_of_constant_curves() {
        let g = grid(11);
        let sample =
            FunctionalSample::new(vec![GridFunction::constant(&g, 0.0), GridFunction::constant(&g, 2.0)]).unwrap();
        let v = Direction::normalize(GridFunction::constant(&g, 1.0)).unwrap();
        assert_eq!(project(&sample, &v).unwrap(), vec![0.0, 2.0]);

        let zero = FunctionalSample::new(vec![GridFunction::zeros(&g)]).unwrap();
        let mut rng = substream(3, &[]);
        let w = sample_direction(&g, &mut rng);
        assert_eq!(project(&zero, &w).unwrap(), vec![0.0]);
    }

    #[test]
    fn constant_direction_projects_to_curve_means() {
        let g = grid(21);
        let x = GridFunction::from_fn(&g, |t| 3.0 * t + 1.0);
        let sample = FunctionalSample::new(vec![x.clone()]).unwrap();
        let v = Direction::normalize(GridFunction::constant(&g, 1.0)).unwrap();
        let mean = x.values().iter().sum::<f64>() / 21.0;
        assert!((project(&sample, &v).unwrap()[0] - mean).abs() < 1e-14);
    }

    #[test]
    fn directions_are_unit_and_reproducible() {
        let g = grid(101);
        for seed in 0..200 {
            let v = sample_direction(&g, &mut substream(seed, &[]));
            assert!((v.as_function().norm() - 1.0).abs() < 1e-10);
            let w = sample_direction(&g, &mut substream(seed, &[]));
            assert_eq!(v, w);
        }
    }

    #[test]
    fn directions_have_mean_zero_projection() {
        let g = grid(101);
        let e = Direction::normalize(GridFunction::from_fn(&g, |t| t - 0.3)).unwrap();
        let mut rng = substream(11, &[]);
        let draws = 10_000;
        let mean = (0..draws)
            .map(|_| {
                let v = sample_direction(&g, &mut rng);
                inner_product(v.as_function(), e.as_function()).unwrap()
            })
            .sum::<f64>()
            / draws as f64;
        assert!(mean.abs() < 0.05, "{mean}");
    }
}
