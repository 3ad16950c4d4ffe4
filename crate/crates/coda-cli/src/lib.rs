//! Pipeline around the compositional toolkit: delimited-text ingestion with
//! the sample filters, zero imputation, clustering with cluster-count
//! selection, grouped ratio tables, association outputs, and deterministic
//! report emission.

pub mod cli;
pub mod config;
pub mod error;
pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod svg;

pub use config::{Covariate, RunConfig};
pub use error::{exit_code, CliError};
pub use ingest::{ingest, Dataset, Exclusion, ExclusionReason};
pub use pipeline::{run_pipeline, RunResult};
