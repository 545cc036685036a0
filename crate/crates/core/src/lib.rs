//! Classify networks by statistics of random walks.
//!
//! The pipeline: generate or load labeled graph datasets, run traditional
//! (`RW`), self-avoiding (`SAW`) and limited-memory (`LMW`) walks from every
//! node, summarize the per-node visit differences and SAW lengths into
//! fixed-length feature vectors, and score feature sets with an LDA
//! classifier under stratified k-fold cross-validation. Two reference
//! extractors (structural measures and the deterministic tourist walk) are
//! included for comparison.
//!
//! Everything is deterministic given a master seed: every walker draws from
//! its own counter-derived RNG stream, so results do not depend on thread
//! count or scheduling.

pub mod baselines;
pub mod classify;
pub mod dataset;
pub mod error;
pub mod features;
pub mod generators;
pub mod graph;
pub mod rng;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
