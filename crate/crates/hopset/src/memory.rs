//! Explicit lower-level paths stored with hopset edges.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::overlay::Link;

/// A walk `vertices[0] .. vertices[t]` where hop `i` goes from `vertices[i]`
/// to `vertices[i + 1]` through `hops[i].0` with weight `hops[i].1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryPath {
    pub vertices: Vec<usize>,
    pub hops: Vec<(Link, f64)>,
}

impl MemoryPath {
    pub fn trivial(v: usize) -> Self {
        MemoryPath {
            vertices: vec![v],
            hops: Vec::new(),
        }
    }

    pub fn first(&self) -> usize {
        self.vertices[0]
    }

    pub fn last(&self) -> usize {
        *self.vertices.last().expect("path has a vertex")
    }

    pub fn hop_count(&self) -> usize {
        self.hops.len()
    }

    pub fn weight(&self) -> f64 {
        self.hops.iter().map(|h| h.1).sum()
    }

    /// Distance of each vertex from the first one along the path.
    pub fn prefix(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.vertices.len());
        let mut acc = 0.0;
        out.push(acc);
        for h in &self.hops {
            acc += h.1;
            out.push(acc);
        }
        out
    }

    /// Distance of each vertex to the last one along the path.
    pub fn suffix(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.vertices.len()];
        let mut acc = 0.0;
        for (i, h) in self.hops.iter().enumerate().rev() {
            acc += h.1;
            out[i] = acc;
        }
        out
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        let mut hops = self.hops.clone();
        hops.reverse();
        MemoryPath { vertices, hops }
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn append(&mut self, other: &MemoryPath) {
        assert_eq!(self.last(), other.first(), "paths do not meet");
        self.vertices.extend_from_slice(&other.vertices[1..]);
        self.hops.extend_from_slice(&other.hops);
    }

    /// Removes cycles in order of appearance, leaving a simple path between
    /// the same endpoints whose weight and hop count did not grow.
    pub fn loop_erase(&mut self) {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut vs: Vec<usize> = Vec::with_capacity(self.vertices.len());
        let mut hs: Vec<(Link, f64)> = Vec::with_capacity(self.hops.len());
        for (i, &v) in self.vertices.iter().enumerate() {
            if let Some(&at) = seen.get(&v) {
                for dropped in vs.drain(at + 1..) {
                    seen.remove(&dropped);
                }
                hs.truncate(at);
                continue;
            }
            if i > 0 {
                hs.push(self.hops[i - 1]);
            }
            seen.insert(v, vs.len());
            vs.push(v);
        }
        self.vertices = vs;
        self.hops = hs;
    }
}
