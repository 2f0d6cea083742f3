//! Experiment plumbing behind the `fdepth` binary: spec files, runners and
//! CSV input/output.

pub mod config;
pub mod csv_io;
pub mod runners;
pub mod table;

pub use config::{ClassifierKind, ExperimentKind, ExperimentSpec, KwReference, RawSpec};
pub use csv_io::{write_dataset, Dataset};
pub use runners::{
    run, run_classification, run_converge, run_depth, run_kwtest, run_location, run_outliers, RunOutput,
};
pub use table::{mean_sd, ResultRow, ResultTable, CSV_HEADER};
