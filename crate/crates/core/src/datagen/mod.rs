//! Seeded generators for the simulation models.

pub mod basis;
pub mod gp;
pub mod kl;
pub mod models;

pub use basis::{bspline_basis, gram_schmidt, legendre_basis, trig_basis};
pub use gp::{gp_sample, GpSampler, GpSpec};
pub use kl::{eigenvalues_from_decay, kl_sample, KlSpec};
pub use models::{generate_model, LabeledSample, ModelFamily, ModelGenerator, ModelId, ModelParams};
