//! Topology-only link prediction for temporal social graphs.
//!
//! The library covers the full experimental loop: ingest a timestamped
//! edge list, freeze an observed snapshot at a cutoff, compute local
//! (Jaccard) and global (HITS authority, normalized degree, transitivity)
//! features, retrieve and rank candidate links through a locality
//! threshold, build labeled real/false link datasets from the observation
//! window, and train/evaluate classifiers with stratified
//! cross-validation. A seedable preferential-attachment generator with a
//! plantable affinity signal makes the whole pipeline testable without
//! proprietary data.
//!
//! Start with the runnable examples (`cargo run --example end_to_end`)
//! or the `linkpred` binary (`linkpred pipeline --help`).

pub mod cli;
pub mod dataset;
pub mod error;
pub mod features;
pub mod graph;
pub mod learners;
pub mod manifest;
pub mod metrics;
pub mod ranker;
pub mod synthgen;

pub use error::{Error, Result};
pub use graph::{load_edge_list, snapshot_at, window_edges, Snapshot, TemporalGraph, VertexId};
