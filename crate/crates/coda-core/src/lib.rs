//! Compositional financial-statement analysis.
//!
//! A composition is a vector of strictly positive parts where only relative
//! magnitudes carry information. This crate provides the log-ratio machinery
//! to treat financial statements as compositions: closure, the centered
//! log-ratio (CLR) transform and the Aitchison distance it induces,
//! compositional centers, the twelve standard statement ratios, censored-EM
//! zero replacement, k-means clustering in CLR space with silhouette /
//! Caliński-Harabasz cluster-count selection, and cluster–covariate
//! association summaries (contingency tables, mosaic geometry, boxplot
//! five-number summaries).
//!
//! The crate is `no_std`-compatible (`default-features = false`); it only
//! requires `alloc`. All types are immutable after construction and all
//! operations are pure, so values may be shared freely across threads.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
pub mod association;
pub mod clustering;
pub mod composition;
pub mod imputation;
pub mod ratios;
pub mod records;

mod math;

pub use error::CodaError;

pub use composition::{
    aitchison_distance, center, clr, clr_inverse, closure, ClrVector, Composition,
    CompositionalCenter,
};
pub use ratios::{
    center_ratios, firm_ratios, grouped_center_ratios, FinancialStatement, GroupBy, GroupLabel,
    GroupProfile, RatioSet,
};
pub use records::{FirmYearRecord, LegalForm};
