//! Classical functional depths: integrated (FD) and infimal (ID) halfspace
//! depth, modified band depth (MBD) with two-curve bands, and spherical depth (SD).

use crate::error::{FdError, Result};
use crate::functional::{dot, FunctionalSample, GridFunction};

/// Per-grid-point sorted sample values, shared by FD, ID and MBD.
#[derive(Debug, Clone)]
pub struct SortedColumns {
    n: usize,
    columns: Vec<Vec<f64>>,
}

impl SortedColumns {
    pub fn new(sample: &FunctionalSample) -> Self {
        let t = sample.grid().len();
        let columns = (0..t)
            .map(|k| {
                let mut col: Vec<f64> = sample.curves().iter().map(|c| c.values()[k]).collect();
                col.sort_by(|a, b| a.total_cmp(b));
                col
            })
            .collect();
        SortedColumns { n: sample.len(), columns }
    }

    /// `(#{X_i(t_k) < v}, #{X_i(t_k) <= v})`.
    #[inline]
    fn counts(&self, k: usize, v: f64) -> (usize, usize) {
        let col = &self.columns[k];
        (col.partition_point(|&z| z < v), col.partition_point(|&z| z <= v))
    }

    /// Univariate halfspace counts `min(#{<= x}, #{>= x})` at every grid point.
    fn halfspace_counts<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = usize> + 'a {
        let n = self.n;
        x.iter().enumerate().map(move |(k, &v)| {
            let (below, le) = self.counts(k, v);
            le.min(n - below)
        })
    }

    /// Integer counts are summed first so that the result is a single rounded ratio.
    pub fn integrated(&self, x: &[f64]) -> f64 {
        self.halfspace_counts(x).sum::<usize>() as f64 / (self.n * x.len()) as f64
    }

    pub fn infimal(&self, x: &[f64]) -> f64 {
        self.halfspace_counts(x).min().unwrap_or(0) as f64 / self.n as f64
    }

    /// Modified band depth: for each grid point the fraction of unordered
    /// pairs whose closed band contains `x(t)`, averaged over the grid.
    pub fn modified_band(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let pairs = n * (n - 1) / 2;
        let choose2 = |k: usize| k * k.saturating_sub(1) / 2;
        let covered: usize = x
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let (below, le) = self.counts(k, v);
                // A pair misses x(t) iff both curves lie strictly on the same side.
                pairs - choose2(below) - choose2(n - le)
            })
            .sum();
        covered as f64 / (pairs * x.len()) as f64
    }
}

/// Reference data for spherical depth: centered curves and their Gram matrix.
#[derive(Debug, Clone)]
pub struct SphericalReference {
    n: usize,
    center: Vec<f64>,
    centered: Vec<Vec<f64>>,
    gram: Vec<f64>,
}

impl SphericalReference {
    pub fn new(sample: &FunctionalSample) -> Self {
        let n = sample.len();
        let t = sample.grid().len();
        let mut center = vec![0.0; t];
        for c in sample.curves() {
            for (m, v) in center.iter_mut().zip(c.values()) {
                *m += v;
            }
        }
        center.iter_mut().for_each(|m| *m /= n as f64);
        let centered: Vec<Vec<f64>> =
            sample.curves().iter().map(|c| c.values().iter().zip(&center).map(|(v, m)| v - m).collect()).collect();
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let g = dot(&centered[i], &centered[j]);
                gram[i * n + j] = g;
                gram[j * n + i] = g;
            }
        }
        SphericalReference { n, center, centered, gram }
    }

    /// Fraction of pairs `{i, j}` with `<X_i - x, X_j - x> <= 0`.
    ///
    /// When `x` coincides with a reference curve, the pairs containing that
    /// curve have inner product exactly zero and are counted without rounding.
    pub fn depth(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let xc: Vec<f64> = x.iter().zip(&self.center).map(|(v, m)| v - m).collect();
        let a: Vec<f64> = self.centered.iter().map(|c| dot(c, &xc)).collect();
        let c = dot(&xc, &xc);
        let same: Vec<bool> = self.centered.iter().map(|ci| ci.as_slice() == xc.as_slice()).collect();
        let mut covered = 0usize;
        for i in 0..n {
            for j in i + 1..n {
                if same[i] || same[j] || self.gram[i * n + j] - a[i] - a[j] + c <= 0.0 {
                    covered += 1;
                }
            }
        }
        covered as f64 / (n * (n - 1) / 2) as f64
    }
}

fn check_pairs(sample: &FunctionalSample) -> Result<()> {
    if sample.len() < 2 {
        return Err(FdError::Structural(format!("pair-based depths need at least 2 curves, got {}", sample.len())));
    }
    Ok(())
}

pub fn depth_fd(x: &GridFunction, sample: &FunctionalSample) -> Result<f64> {
    sample.check_grid(x)?;
    Ok(SortedColumns::new(sample).integrated(x.values()))
}

pub fn depth_id(x: &GridFunction, sample: &FunctionalSample) -> Result<f64> {
    sample.check_grid(x)?;
    Ok(SortedColumns::new(sample).infimal(x.values()))
}

pub fn depth_mbd(x: &GridFunction, sample: &FunctionalSample) -> Result<f64> {
    sample.check_grid(x)?;
    check_pairs(sample)?;
    Ok(SortedColumns::new(sample).modified_band(x.values()))
}

pub fn depth_sd(x: &GridFunction, sample: &FunctionalSample) -> Result<f64> {
    sample.check_grid(x)?;
    check_pairs(sample)?;
    Ok(SphericalReference::new(sample).depth(x.values()))
}
