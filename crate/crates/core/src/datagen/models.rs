//! The simulation models: outlier (D1-D6), classification (C1-C3),
//! two-sample testing (T1-T4) and contaminated location (L1-L6) designs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;

use super::basis::{bspline_basis, gram_schmidt, legendre_basis, trig_basis};
use super::gp::{equicorrelation, exponential_kernel, powered_exponential_kernel, GpSampler, GpSpec, Mvn};
use super::kl::{eigenvalues_from_decay, KlSpec};
use crate::error::{FdError, Result};
use crate::functional::{FunctionalSample, Grid, GridFunction};

/// Number of eigenfunctions in the two-sample designs.
pub const KL_COMPONENTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelId {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    C1,
    C2,
    C3,
    T1,
    T2,
    T3,
    T4,
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    /// `n` curves, `m` of them outlying.
    Outlier,
    /// `n` curves from each of two classes.
    Classification,
    /// Two groups of `n/2` curves, the second shifted by severity `c`.
    TwoSample,
    /// `ceil((1-eps) n)` clean curves followed by `floor(eps n)` contaminants.
    Contamination,
}

impl ModelId {
    pub const ALL: [ModelId; 19] = [
        ModelId::D1,
        ModelId::D2,
        ModelId::D3,
        ModelId::D4,
        ModelId::D5,
        ModelId::D6,
        ModelId::C1,
        ModelId::C2,
        ModelId::C3,
        ModelId::T1,
        ModelId::T2,
        ModelId::T3,
        ModelId::T4,
        ModelId::L1,
        ModelId::L2,
        ModelId::L3,
        ModelId::L4,
        ModelId::L5,
        ModelId::L6,
    ];

    pub fn family(self) -> ModelFamily {
        use ModelId::*;
        match self {
            D1 | D2 | D3 | D4 | D5 | D6 => ModelFamily::Outlier,
            C1 | C2 | C3 => ModelFamily::Classification,
            T1 | T2 | T3 | T4 => ModelFamily::TwoSample,
            L1 | L2 | L3 | L4 | L5 | L6 => ModelFamily::Contamination,
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ModelId {
    type Err = FdError;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        ModelId::ALL
            .iter()
            .copied()
            .find(|m| m.to_string() == upper)
            .ok_or_else(|| FdError::Config(format!("unknown model '{s}'")))
    }
}

/// Size and severity parameters; each family reads the fields it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Sample size (per class for classification models, total otherwise).
    pub n: usize,
    pub grid_len: usize,
    /// Number of outliers `m` (outlier models).
    pub outliers: usize,
    /// Contamination fraction (location models).
    pub epsilon: f64,
    /// Severity `c` in [0, 1] (two-sample models).
    pub severity: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { n: 100, grid_len: 101, outliers: 10, epsilon: 0.0, severity: 0.0 }
    }
}

impl ModelParams {
    pub fn validate(&self, id: ModelId) -> Result<()> {
        if self.grid_len < 2 {
            return Err(FdError::Config(format!("grid needs at least 2 points, got {}", self.grid_len)));
        }
        if self.n == 0 {
            return Err(FdError::Config("sample size must be positive".into()));
        }
        match id.family() {
            ModelFamily::Outlier if self.outliers > self.n => {
                Err(FdError::Config(format!("{id}: {} outliers exceed the sample size {}", self.outliers, self.n)))
            }
            ModelFamily::TwoSample if self.n < 2 || !self.n.is_multiple_of(2) => {
                Err(FdError::Config(format!("{id}: total sample size must be even and at least 2, got {}", self.n)))
            }
            ModelFamily::TwoSample if !(0.0..=1.0).contains(&self.severity) => {
                Err(FdError::Config(format!("{id}: severity must lie in [0, 1], got {}", self.severity)))
            }
            ModelFamily::Contamination if !(0.0..0.5).contains(&self.epsilon) => {
                Err(FdError::Config(format!("{id}: contamination must lie in [0, 0.5), got {}", self.epsilon)))
            }
            _ => Ok(()),
        }
    }
}

/// A sample with one boolean label per curve: outlier, class `Y`, second
/// group or contaminant, depending on the family.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub sample: FunctionalSample,
    pub labels: Vec<bool>,
}

impl LabeledSample {
    fn new(curves: Vec<GridFunction>, labels: Vec<bool>) -> Result<Self> {
        debug_assert_eq!(curves.len(), labels.len());
        Ok(LabeledSample { sample: FunctionalSample::new(curves)?, labels })
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    /// Split into the curves labelled `false` and those labelled `true`.
    pub fn split(&self) -> (Vec<GridFunction>, Vec<GridFunction>) {
        let mut neg = Vec::new();
        let mut pos = Vec::new();
        for (c, &l) in self.sample.curves().iter().zip(&self.labels) {
            if l {
                pos.push(c.clone())
            } else {
                neg.push(c.clone())
            }
        }
        (neg, pos)
    }
}

/// Counts of clean and contaminating curves: `ceil((1-eps) n)` and `floor(eps n)`.
pub fn contamination_counts(n: usize, epsilon: f64) -> (usize, usize) {
    // Round eps * n to 1e-9 first so that e.g. 0.05 * 100 counts as 5.
    let contaminated = ((epsilon * n as f64 + 1e-9).floor() as usize).min(n);
    (n - contaminated, contaminated)
}

/// Curves expanded in a fixed basis with Gaussian coefficients.
#[derive(Debug, Clone)]
struct BasisGaussian {
    offset: GridFunction,
    basis: Vec<GridFunction>,
    coefficients: Mvn,
}

impl BasisGaussian {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> GridFunction {
        let c = self.coefficients.draw(rng);
        let mut out = self.offset.clone();
        for (cj, phi) in c.iter().zip(&self.basis) {
            for (o, p) in out.values_mut().iter_mut().zip(phi.values()) {
                *o += cj * p;
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
enum Generator {
    Gp(GpSampler),
    /// `sin(20 (t + theta) pi) + f(t)` with `theta ~ U(0.25, 0.5)`.
    HighFrequency {
        grid: Arc<Grid>,
        noise: GpSampler,
    },
    /// `mean + 8 k + e(t)` with `k = +-1` equally likely.
    Magnitude {
        base: GpSampler,
    },
    Basis(BasisGaussian),
    Kl(KlSpec),
    /// `factor * X` for `X` drawn from the inner generator.
    Scaled(Box<Generator>, f64),
}

impl Generator {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> GridFunction {
        match self {
            Generator::Gp(s) => s.draw(rng),
            Generator::HighFrequency { grid, noise } => {
                let theta: f64 = rng.random_range(0.25..0.5);
                let f = noise.draw(rng);
                GridFunction::from_fn(grid, |t| (20.0 * (t + theta) * PI).sin()).add_scaled(1.0, &f).expect("same grid")
            }
            Generator::Magnitude { base } => {
                let k = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let e = base.draw(rng);
                let shift = GridFunction::constant(e.grid(), 8.0 * k);
                e.add_scaled(1.0, &shift).expect("same grid")
            }
            Generator::Basis(b) => b.draw(rng),
            Generator::Kl(k) => k.draw(rng),
            Generator::Scaled(inner, factor) => inner.draw(rng).scale(*factor),
        }
    }
}

/// A model with all bases, covariance factors and spectra precomputed;
/// [`ModelGenerator::generate`] only draws random numbers.
#[derive(Debug, Clone)]
pub struct ModelGenerator {
    id: ModelId,
    params: ModelParams,
    grid: Arc<Grid>,
    /// Clean / class X / first group.
    first: Generator,
    /// Outliers / class Y / second group / contaminants.
    second: Generator,
}

fn gp(
    grid: &Arc<Grid>,
    mean: impl Fn(f64) -> f64,
    kernel: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
) -> Result<Generator> {
    Ok(Generator::Gp(GpSampler::new(&GpSpec::new(GridFunction::from_fn(grid, mean), kernel))?))
}

fn clean_errors(grid: &Arc<Grid>, mean: impl Fn(f64) -> f64, lambda: f64) -> Result<Generator> {
    gp(grid, mean, exponential_kernel(lambda))
}

/// First eigenvector convention for the dimension-difference model: the
/// projection of the first canonical vector onto the top eigenspace of `m`,
/// normalized. This is unique even when the top eigenvalue is repeated.
pub fn leading_eigenvector(m: &DMatrix<f64>) -> Vec<f64> {
    let dim = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let top = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * top.abs().max(1.0);
    let mut v = vec![0.0; dim];
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        if (lambda - top).abs() <= tol {
            let col = eig.eigenvectors.column(j);
            let proj = col[0];
            for i in 0..dim {
                v[i] += proj * col[i];
            }
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        // First canonical vector orthogonal to the eigenspace: fall back to the
        // numerical eigenvector, sign fixed by its first nonzero coordinate.
        let j = eig.eigenvalues.iter().position(|&l| (l - top).abs() <= tol).unwrap_or(0);
        let col: Vec<f64> = eig.eigenvectors.column(j).iter().copied().collect();
        let sign = col.iter().find(|x| x.abs() > 1e-12).map_or(1.0, |x| x.signum());
        return col.into_iter().map(|x| sign * x).collect();
    }
    v.into_iter().map(|x| x / norm).collect()
}

impl ModelGenerator {
    pub fn new(id: ModelId, params: ModelParams) -> Result<Self> {
        params.validate(id)?;
        let grid = Grid::uniform(params.grid_len)?;
        let g = &grid;
        use ModelId::*;
        let (first, second) = match id {
            D1 => (
                clean_errors(g, |t| 4.0 * t, 1.0)?,
                Generator::Magnitude {
                    base: GpSampler::new(&GpSpec::new(GridFunction::from_fn(g, |t| 4.0 * t), exponential_kernel(1.0)))?,
                },
            ),
            D2 => (
                clean_errors(g, |t| 30.0 * t * (1.0 - t).powf(1.5), 0.3)?,
                clean_errors(g, |t| 30.0 * t.powf(1.5) * (1.0 - t), 0.3)?,
            ),
            D3 => (clean_errors(g, |t| 4.0 * t, 1.0)?, gp(g, |t| 4.0 * t, powered_exponential_kernel(5.0, 0.5, 0.5))?),
            D4 => (
                clean_errors(g, |t| 2.0 * (15.0 * PI * t).sin(), 1.0)?,
                clean_errors(g, |t| 2.0 * (15.0 * PI * t + 2.0).sin(), 1.0)?,
            ),
            D5 => {
                let noise =
                    GpSpec::new(GridFunction::zeros(g), powered_exponential_kernel(0.1, 0.1, 4.0)).with_clipping();
                (
                    clean_errors(g, |_| 0.0, 1.0)?,
                    Generator::HighFrequency { grid: Arc::clone(g), noise: GpSampler::new(&noise)? },
                )
            }
            D6 => {
                let basis = legendre_basis(g, 6)?;
                let sigma = equicorrelation(6, 0.95);
                let inv =
                    sigma.clone().try_inverse().ok_or_else(|| FdError::Numerical("singular covariance".into()))?
                        / 100.0;
                let offset = GridFunction::zeros(g);
                (
                    Generator::Basis(BasisGaussian {
                        offset: offset.clone(),
                        basis: basis.clone(),
                        coefficients: Mvn::new(vec![0.0; 6], sigma)?,
                    }),
                    Generator::Basis(BasisGaussian { offset, basis, coefficients: Mvn::new(vec![1.0; 6], inv)? }),
                )
            }
            C1 => {
                let kernel = |s: f64, t: f64| 0.2 * (-(s - t).abs() / 0.3).exp();
                (gp(g, |t| 30.0 * t.powf(1.2) * (1.0 - t), kernel)?, gp(g, |t| 30.0 * t * (1.0 - t).powf(1.2), kernel)?)
            }
            C2 | C3 => {
                let phi = legendre_basis(g, 7)?;
                let sigma = equicorrelation(7, 0.9);
                let mu = GridFunction::from_fn(g, |t| 10.0 * t * (1.0 - t));
                let x = BasisGaussian {
                    offset: mu.clone(),
                    basis: phi.clone(),
                    coefficients: Mvn::new(vec![0.0; 7], sigma.clone())?,
                };
                let y = if id == C2 {
                    let splines = bspline_basis(g, 21, 3)?;
                    let mut basis = phi[..5].to_vec();
                    basis.push(splines[10].clone());
                    basis.push(splines[11].clone());
                    let mut mean = vec![0.0; 7];
                    mean[5] = 1.0;
                    mean[6] = 1.0;
                    BasisGaussian { offset: mu, basis, coefficients: Mvn::new(mean, sigma)? }
                } else {
                    let sub = sigma.view((0, 0), (5, 5)).into_owned();
                    let sigma2 =
                        sub.try_inverse().ok_or_else(|| FdError::Numerical("singular covariance".into()))? / 10.0;
                    let mean = leading_eigenvector(&sigma2);
                    BasisGaussian {
                        offset: GridFunction::zeros(g),
                        basis: phi[..5].to_vec(),
                        coefficients: Mvn::new(mean, sigma2)?,
                    }
                };
                (Generator::Basis(x), Generator::Basis(y))
            }
            T1 | T2 | T3 | T4 => {
                let c = params.severity;
                // Discretely orthonormalized so that both groups share an exactly
                // orthonormal system and T4 at c = 0 reproduces the first group.
                let high = gram_schmidt(&trig_basis(g, 2 * KL_COMPONENTS)?)?;
                let phi = high[..KL_COMPONENTS].to_vec();
                let gamma = eigenvalues_from_decay(5.0, KL_COMPONENTS)?;
                let zero = GridFunction::zeros(g);
                let first = KlSpec::new(zero.clone(), gamma.clone(), phi.clone())?;
                let second = match id {
                    T1 => KlSpec::new(GridFunction::constant(g, 3.0 * c), gamma, phi)?,
                    T2 => KlSpec::new(GridFunction::from_fn(g, |t| c * 1.2 * (2.0 * PI * t).sin()), gamma, phi)?,
                    T3 => KlSpec::new(zero, eigenvalues_from_decay((1.0 - c) * 5.0 + c * 2.5, KL_COMPONENTS)?, phi)?,
                    _ => {
                        let mixed: Vec<GridFunction> = (0..KL_COMPONENTS)
                            .map(|j| high[j].scale(1.0 - c).add_scaled(c, &high[j + KL_COMPONENTS]))
                            .collect::<Result<_>>()?;
                        KlSpec::new(zero, gamma, gram_schmidt(&mixed)?)?
                    }
                };
                (Generator::Kl(first), Generator::Kl(second))
            }
            L1 | L2 | L3 | L4 | L5 | L6 => {
                let kernel = |s: f64, t: f64| 0.5 * (-(s - t).abs() / 10.0).exp();
                let clean = gp(g, |t| (2.0 * PI * t).sin(), kernel)?;
                let contaminant = match id {
                    L1 => gp(g, |t| (2.0 * PI * t).sin() + 1.0, kernel)?,
                    L2 => Generator::Scaled(Box::new(clean.clone()), 2.0),
                    L3 => gp(g, |t| (2.0 * PI * (t + 0.125)).sin(), kernel)?,
                    L4 => gp(g, |t| (2.0 * PI * t).sin() + (8.0 * PI * t).sin() / 6.0, kernel)?,
                    L5 => gp(g, |t| (2.0 * PI * t).sin() + 2.0 * (-1000.0 * (t - 0.8).powi(2)).exp(), kernel)?,
                    _ => gp(g, |t| (2.0 * PI * t).sin() + 1000.0, kernel)?,
                };
                (clean, contaminant)
            }
        };
        Ok(ModelGenerator { id, params, grid, first, second })
    }

    pub fn id(&self) -> ModelId {
        self.id
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Counts of `(false, true)` labels this model produces.
    pub fn label_counts(&self) -> (usize, usize) {
        let p = &self.params;
        match self.id.family() {
            ModelFamily::Outlier => (p.n - p.outliers, p.outliers),
            ModelFamily::Classification => (p.n, p.n),
            ModelFamily::TwoSample => (p.n / 2, p.n / 2),
            ModelFamily::Contamination => contamination_counts(p.n, p.epsilon),
        }
    }

    /// Mean function of the clean / first-group distribution, where it is
    /// available in closed form.
    pub fn clean_mean(&self) -> Option<GridFunction> {
        match &self.first {
            Generator::Kl(k) => Some(k.mean.clone()),
            _ if self.id.family() == ModelFamily::Contamination => {
                Some(GridFunction::from_fn(&self.grid, |t| (2.0 * PI * t).sin()))
            }
            _ => None,
        }
    }

    /// Draw one labelled sample.
    ///
    /// Curves are drawn in a fixed order: all `false`-labelled curves, then all
    /// `true`-labelled ones, each consuming the stream curve by curve. Outlier
    /// models then shuffle the sample with the same stream, so outliers do not
    /// sit at the end and depth ties are not resolved in their favour or against it.
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LabeledSample> {
        let (neg, pos) = self.label_counts();
        let mut curves = Vec::with_capacity(neg + pos);
        curves.extend((0..neg).map(|_| self.first.draw(rng)));
        curves.extend((0..pos).map(|_| self.second.draw(rng)));
        let mut labels: Vec<bool> = std::iter::repeat_n(false, neg).chain(std::iter::repeat_n(true, pos)).collect();
        if self.id.family() == ModelFamily::Outlier {
            let mut order: Vec<usize> = (0..curves.len()).collect();
            order.shuffle(rng);
            let mut slots: Vec<Option<GridFunction>> = curves.into_iter().map(Some).collect();
            curves = order.iter().map(|&i| slots[i].take().expect("permutation")).collect();
            labels = order.iter().map(|&i| labels[i]).collect();
        }
        LabeledSample::new(curves, labels)
    }
}

pub fn generate_model<R: Rng + ?Sized>(id: ModelId, params: &ModelParams, rng: &mut R) -> Result<LabeledSample> {
    ModelGenerator::new(id, params.clone())?.generate(rng)
}
