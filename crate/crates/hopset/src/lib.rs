//! Deterministic hopsets for weighted undirected graphs.
//!
//! A `(1+ε, β)`-hopset `H` is a set of weighted edges such that for every pair
//! of vertices the shortest path using at most `β` edges of `G ∪ H` is within a
//! factor `1+ε` of the true distance, while no edge of `H` is shorter than
//! the distance it spans. This crate builds such hopsets by superclustering
//! and interconnection over a sequence of distance scales, answers
//! approximate distance queries with `β`-hop Bellman-Ford, and turns the
//! query trees back into approximate shortest-path trees over the original
//! edges.

pub mod builder;
pub mod cli;
pub mod cluster;
pub mod error;
pub mod exploration;
pub mod graph;
pub mod io;
pub mod memory;
pub mod overlay;
pub mod query;
pub mod reduction;
pub mod ruling;
pub mod schedule;
pub mod spt;
pub mod sssp;
pub mod synth;
pub mod validate;

pub use builder::{build_hopset, BuildOptions, Hopset, HopsetParams};
pub use reduction::build_reduced_hopset;
pub use spt::{extract_spt, PathTree, SptResult};
pub use error::{Error, Result};
pub use graph::Graph;
pub use query::HopsetIndex;
pub use schedule::{compute_schedule, EpsilonMode, ParameterSchedule};
