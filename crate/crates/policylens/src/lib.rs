//! PolicyLens: discovery and analysis of smart-device privacy policies.
//!
//! The crate is organized as a pipeline of independent modules:
//!
//! - [`discovery`] — parse e-commerce product pages, score how "smart" a
//!   product is, and resolve manufacturer websites from search results.
//! - [`policy_finder`] — locate privacy-policy links on a page and extract
//!   clean policy text from boilerplate-heavy HTML.
//! - [`langid`] — in-house language detection ensemble with majority voting.
//! - [`policy_detect`] — keyphrase-based classifier deciding whether an
//!   extracted page is a privacy/cookie policy.
//! - [`readability`] — the eight readability features of a policy text.
//! - [`topics`] — LDA topic modeling, NPMI coherence, and taxonomy keyword
//!   counting.
//! - [`similarity`] — TF-IDF vectors, cosine similarity matrices,
//!   sentence-level policy diffs, PCA projection, and DBSCAN clustering.
//! - [`ml`] — from-scratch classifiers, resampling, cross-validation, and
//!   metrics for the ambiguity and overall-assessment models.
//! - [`archive`] — Wayback Machine CDX client behind a pluggable fetcher.
//! - [`privacy_analysis`] — keyword coverage, last-update detection, and
//!   device-mention detection.
//! - [`corpus`] — append-only JSONL store for products, manufacturers,
//!   policies, and reports.
//! - [`pipeline`] — configuration and the end-to-end commands exposed by
//!   the `policylens` binary.
//!
//! Every capability has a runnable example under `examples/`; start with
//! `cargo run --example readability_report`.

pub mod archive;
pub mod corpus;
pub mod discovery;
pub mod error;
pub mod html;
pub mod langid;
pub mod ml;
pub mod pipeline;
pub mod policy_detect;
pub mod policy_finder;
pub mod privacy_analysis;
pub mod readability;
pub mod similarity;
pub mod text;
pub mod topics;

pub use error::{Error, Result};

/// Version string stamped into analysis reports.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
