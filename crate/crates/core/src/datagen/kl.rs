//! Karhunen-Loeve expansions with eigenvalues given by their eigengaps.

use rand::Rng;
use rand_distr::StandardNormal;

use super::basis::gram_deviation;
use crate::error::{FdError, Result};
use crate::functional::{same_grid, FunctionalSample, GridFunction};

const TAIL_TERMS: usize = 1_000_000;

/// Eigenvalues `gamma_j = 2 sum_{m >= j} m^-a`, `j = 1..=count`, so that
/// consecutive gaps are `2 j^-a`.
///
/// The series is summed from `m = 10^6` down to 1 (smallest terms first), and
/// the remainder beyond `10^6` is added in Euler-Maclaurin form.
pub fn eigenvalues_from_decay(a: f64, count: usize) -> Result<Vec<f64>> {
    if !(a > 2.0) || !a.is_finite() {
        return Err(FdError::Domain(format!("decay rate must exceed 2, got {a}")));
    }
    if count == 0 {
        return Err(FdError::Domain("need at least one eigenvalue".into()));
    }
    let count = count.min(TAIL_TERMS);
    let x = (TAIL_TERMS + 1) as f64;
    let remainder = x.powf(1.0 - a) / (a - 1.0) + 0.5 * x.powf(-a) + a * x.powf(-a - 1.0) / 12.0;
    let mut acc = remainder;
    let mut tails = vec![0.0; count];
    for m in (1..=TAIL_TERMS).rev() {
        acc += (m as f64).powf(-a);
        if m <= count {
            tails[m - 1] = 2.0 * acc;
        }
    }
    Ok(tails)
}

/// Mean, eigenvalues and discrete-orthonormal eigenfunctions of a truncated
/// Karhunen-Loeve expansion.
#[derive(Debug, Clone)]
pub struct KlSpec {
    pub mean: GridFunction,
    pub eigenvalues: Vec<f64>,
    pub eigenfunctions: Vec<GridFunction>,
}

impl KlSpec {
    pub fn new(mean: GridFunction, eigenvalues: Vec<f64>, eigenfunctions: Vec<GridFunction>) -> Result<Self> {
        if eigenvalues.len() != eigenfunctions.len() || eigenvalues.is_empty() {
            return Err(FdError::Structural(format!(
                "{} eigenvalues for {} eigenfunctions",
                eigenvalues.len(),
                eigenfunctions.len()
            )));
        }
        if eigenvalues.iter().any(|&g| !(g >= 0.0) || !g.is_finite()) {
            return Err(FdError::Domain("eigenvalues must be finite and nonnegative".into()));
        }
        if eigenvalues.windows(2).any(|w| w[1] > w[0]) {
            return Err(FdError::Domain("eigenvalues must be nonincreasing".into()));
        }
        if eigenfunctions.iter().any(|f| !same_grid(f.grid(), mean.grid())) {
            return Err(FdError::Structural("eigenfunctions and mean must share the grid".into()));
        }
        Ok(KlSpec { mean, eigenvalues, eigenfunctions })
    }

    /// Deviation of the eigenfunction Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        gram_deviation(&self.eigenfunctions).expect("shared grid checked at construction")
    }

    /// One curve `mean + sum_j sqrt(gamma_j) xi_j phi_j`, scores drawn in index order.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> GridFunction {
        let mut out = self.mean.clone();
        for (gamma, phi) in self.eigenvalues.iter().zip(&self.eigenfunctions) {
            let xi: f64 = rng.sample(StandardNormal);
            let coef = gamma.sqrt() * xi;
            for (o, p) in out.values_mut().iter_mut().zip(phi.values()) {
                *o += coef * p;
            }
        }
        out
    }
}

pub fn kl_sample<R: Rng + ?Sized>(spec: &KlSpec, n: usize, rng: &mut R) -> Result<FunctionalSample> {
    FunctionalSample::new((0..n).map(|_| spec.draw(rng)).collect())
}
