//! Monte-Carlo harness for the sparse-PCA estimators in `spca-core`:
//! configuration, seeded parallel runs, CSV tables and SVG figures.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod counterexample;
pub mod error;
pub mod output;
pub mod plot;
pub mod runner;

pub use config::{parse_config, ConfigOverrides, ExperimentConfig, Method, Profile};
pub use error::{LabError, Result};
pub use runner::{run_experiment, Mode, RecordMethod, ReplicationRecord, ResultSet, SummaryRow};
