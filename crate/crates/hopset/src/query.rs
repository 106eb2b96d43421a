//! Approximate distance queries over `G ∪ H`.

use rayon::prelude::*;

use crate::builder::Hopset;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::overlay::Overlay;
use crate::sssp::{bellman_ford_with, BfOptions, DistanceVector};

/// A hopset bound to its graph, ready to answer queries.
#[derive(Clone, Debug)]
pub struct HopsetIndex {
    overlay: Overlay,
    hopbound: u64,
    stretch_bound: f64,
}

impl HopsetIndex {
    /// Fails with `Mismatch` if the hopset was built for another graph.
    pub fn new(g: &Graph, h: &Hopset) -> Result<Self> {
        h.check_graph(g)?;
        Ok(HopsetIndex {
            overlay: h.overlay(g),
            hopbound: h.hopbound,
            stretch_bound: h.stretch_bound,
        })
    }

    pub fn overlay(&self) -> &Overlay {
        &self.overlay
    }

    pub fn hopbound(&self) -> u64 {
        self.hopbound
    }

    pub fn stretch_bound(&self) -> f64 {
        self.stretch_bound
    }

    fn check_sources(&self, sources: &[usize]) -> Result<()> {
        if sources.is_empty() {
            return Err(Error::Config("at least one source is required".into()));
        }
        match sources.iter().find(|&&s| s >= self.overlay.n()) {
            Some(s) => Err(Error::Config(format!("source {s} is not a vertex"))),
            None => Ok(()),
        }
    }

    /// `β`-hop distances from the source set.
    pub fn sssd(&self, sources: &[usize]) -> Result<DistanceVector> {
        self.check_sources(sources)?;
        Ok(self.run(sources, false))
    }

    /// Like `sssd` but keeps the change log for exact path recovery.
    pub fn sssd_traced(&self, sources: &[usize]) -> Result<DistanceVector> {
        self.check_sources(sources)?;
        Ok(self.run(sources, true))
    }

    /// One independent query per source, in parallel.
    pub fn mssd(&self, sources: &[usize]) -> Result<Vec<DistanceVector>> {
        self.check_sources(sources)?;
        Ok(sources.par_iter().map(|&s| self.run(&[s], false)).collect())
    }

    fn run(&self, sources: &[usize], trace: bool) -> DistanceVector {
        bellman_ford_with(
            &self.overlay,
            sources,
            BfOptions {
                hopbound: self.hopbound,
                cap: None,
                trace,
            },
        )
    }
}
