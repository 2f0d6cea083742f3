//! Gaussian processes on a grid and finite-dimensional Gaussian vectors.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{FdError, Result};
use crate::functional::{FunctionalSample, GridFunction};

pub type Kernel = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Mean function and covariance kernel of a Gaussian process.
#[derive(Clone)]
pub struct GpSpec {
    pub mean: GridFunction,
    pub covariance: Kernel,
    /// Permit clipping of negative eigenvalues when jitter cannot make the
    /// covariance matrix factorizable.
    pub allow_clipping: bool,
}

impl fmt::Debug for GpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GpSpec")
            .field("grid_len", &self.mean.len())
            .field("allow_clipping", &self.allow_clipping)
            .finish()
    }
}

impl GpSpec {
    pub fn new(mean: GridFunction, covariance: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        GpSpec { mean, covariance: Arc::new(covariance), allow_clipping: false }
    }

    pub fn with_clipping(mut self) -> Self {
        self.allow_clipping = true;
        self
    }

    pub fn covariance_matrix(&self) -> DMatrix<f64> {
        let pts = self.mean.grid().points();
        let t = pts.len();
        DMatrix::from_fn(t, t, |i, j| (self.covariance)(pts[i], pts[j]))
    }
}

/// `lambda * exp(-|s - t| / lambda)`, the error process of the outlier models.
pub fn exponential_kernel(lambda: f64) -> impl Fn(f64, f64) -> f64 + Send + Sync + Copy {
    move |s, t| lambda * (-(s - t).abs() / lambda).exp()
}

/// `scale * exp(-|s - t|^power / length)`.
pub fn powered_exponential_kernel(
    scale: f64,
    power: f64,
    length: f64,
) -> impl Fn(f64, f64) -> f64 + Send + Sync + Copy {
    move |s, t| scale * (-(s - t).abs().powf(power) / length).exp()
}

/// Lower-triangular (or, after clipping, full) factor `F` with `F F^T ~= cov`.
///
/// Cholesky is tried first. If it fails, diagonal jitter of
/// `10^-10 .. 10^-6` times the largest variance is added. If that still fails
/// and clipping is allowed, negative eigenvalues are set to zero.
pub(crate) fn factorize(cov: &DMatrix<f64>, allow_clipping: bool) -> Result<DMatrix<f64>> {
    let dim = cov.nrows();
    let max_diag = (0..dim).map(|i| cov[(i, i)]).fold(0.0, f64::max);
    if max_diag == 0.0 && cov.iter().all(|&c| c == 0.0) {
        return Ok(DMatrix::zeros(dim, dim));
    }
    if let Some(ch) = cov.clone().cholesky() {
        return Ok(ch.l());
    }
    for exp in [-10, -9, -8, -7, -6] {
        let mut jittered = cov.clone();
        let jitter = 10f64.powi(exp) * max_diag;
        for i in 0..dim {
            jittered[(i, i)] += jitter;
        }
        if let Some(ch) = jittered.cholesky() {
            return Ok(ch.l());
        }
    }
    let eig = SymmetricEigen::new(cov.clone());
    let smallest = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if !allow_clipping {
        return Err(FdError::Numerical(format!(
            "covariance matrix is not positive semidefinite (smallest eigenvalue {smallest:.3e})"
        )));
    }
    log::warn!("clipping negative covariance eigenvalues (smallest {smallest:.3e}) to zero");
    let mut factor = eig.eigenvectors.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        factor.column_mut(j).scale_mut(s);
    }
    Ok(factor)
}

/// `out = mean + F z` with `z` standard normal; consumes `dim` normals.
fn draw_into<R: Rng + ?Sized>(mean: &[f64], factor: &DMatrix<f64>, out: &mut [f64], z: &mut [f64], rng: &mut R) {
    for zi in z.iter_mut() {
        *zi = rng.sample(StandardNormal);
    }
    let dim = mean.len();
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for j in 0..dim {
            acc += factor[(i, j)] * z[j];
        }
        *o = mean[i] + acc;
    }
}

/// Gaussian process with a precomputed covariance factor.
#[derive(Debug, Clone)]
pub struct GpSampler {
    mean: GridFunction,
    factor: DMatrix<f64>,
}

impl GpSampler {
    pub fn new(spec: &GpSpec) -> Result<Self> {
        let factor = factorize(&spec.covariance_matrix(), spec.allow_clipping)?;
        Ok(GpSampler { mean: spec.mean.clone(), factor })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> GridFunction {
        let t = self.mean.len();
        let mut out = GridFunction::zeros(self.mean.grid());
        let mut z = vec![0.0; t];
        draw_into(self.mean.values(), &self.factor, out.values_mut(), &mut z, rng);
        out
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<FunctionalSample> {
        FunctionalSample::new((0..n).map(|_| self.draw(rng)).collect())
    }
}

pub fn gp_sample<R: Rng + ?Sized>(spec: &GpSpec, n: usize, rng: &mut R) -> Result<FunctionalSample> {
    if n == 0 {
        return Err(FdError::Structural("cannot draw an empty sample".into()));
    }
    GpSampler::new(spec)?.sample(n, rng)
}

/// Multivariate normal vector `N(mean, cov)`.
#[derive(Debug, Clone)]
pub struct Mvn {
    mean: Vec<f64>,
    factor: DMatrix<f64>,
}

impl Mvn {
    pub fn new(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != mean.len() || cov.ncols() != mean.len() {
            return Err(FdError::Structural("mean and covariance dimensions differ".into()));
        }
        Ok(Mvn { factor: factorize(&cov, false)?, mean })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.mean.len()];
        let mut z = vec![0.0; self.mean.len()];
        draw_into(&self.mean, &self.factor, &mut out, &mut z, rng);
        out
    }
}

/// Matrix with unit diagonal and constant off-diagonal `rho`.
pub fn equicorrelation(dim: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| if i == j { 1.0 } else { rho })
}
