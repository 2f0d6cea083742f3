//! Downstream uses of a depth: outlier ranking, DD classification,
//! rank-based two-sample testing and deepest-curve location estimation.

pub mod classify;
pub mod kruskal;
pub mod location;
pub mod outlier;

pub use classify::{classify, dd_transform, fit_linear_dd, Class, ClassifierModel, DdPoint};
pub use kruskal::{kw_test, KwResult};
pub use location::{deepest_curve, deepest_index, location_metrics, LocationMetrics};
pub use outlier::{rank_by_depth, OutlierReport};
