//! Functional depth toolkit built around the regularized projection depth.
//!
//! Modules, bottom-up:
//!
//! - [`functional`]: grids, curves, samples, unit directions and the discrete L2 geometry.
//! - [`robust`]: median, MAD and empirical quantiles.
//! - [`depth`]: random-projection RPD plus FD, MBD, ID and SD.
//! - [`datagen`]: Gaussian-process, basis-expansion and Karhunen-Loeve generators for the
//!   simulation models.
//! - [`tasks`]: outlier ranking, DD classifiers, depth-based Kruskal-Wallis tests and
//!   deepest-curve location estimation.
//! - [`experiment`]: configuration files, Monte Carlo runners and CSV output used by the
//!   `fdepth` binary.
//!
//! ```
//! use fdepth::depth::{depth_sample, DepthConfig, DepthMethod};
//! use fdepth::functional::{FunctionalSample, Grid, GridFunction};
//!
//! let grid = Grid::uniform(21).unwrap();
//! let sample = FunctionalSample::new(
//!     [0.0, 1.0, 2.0].iter().map(|&c| GridFunction::constant(&grid, c)).collect(),
//! )
//! .unwrap();
//! let fd = depth_sample(&sample, DepthMethod::Fd, &DepthConfig::default()).unwrap();
//! assert!((fd.values[1] - 2.0 / 3.0).abs() < 1e-12);
//! ```

pub mod datagen;
pub mod depth;
pub mod error;
pub mod experiment;
pub mod functional;
pub mod rng;
pub mod robust;
pub mod tasks;

pub use error::{FdError, Result};
