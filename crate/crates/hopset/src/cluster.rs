//! Vertex-disjoint clusters with designated centers.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    /// Center vertex; also the cluster's ID.
    pub center: usize,
    pub members: Vec<usize>,
}

/// A collection of disjoint clusters over a subset of `0..n`, kept sorted by
/// center so cluster index order equals ID order.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterPartition {
    n: usize,
    phase: usize,
    clusters: Vec<Cluster>,
    of_vertex: Vec<Option<usize>>,
    index_of: Vec<Option<usize>>,
}

impl ClusterPartition {
    pub fn singletons(n: usize) -> Self {
        let clusters = (0..n)
            .map(|v| Cluster {
                center: v,
                members: vec![v],
            })
            .collect();
        Self::new(n, 0, clusters).expect("singletons are a partition")
    }

    pub fn new(n: usize, phase: usize, mut clusters: Vec<Cluster>) -> Result<Self> {
        clusters.sort_by_key(|c| c.center);
        let mut of_vertex = vec![None; n];
        let mut index_of = vec![None; n];
        for (i, c) in clusters.iter_mut().enumerate() {
            c.members.sort_unstable();
            if c.members.binary_search(&c.center).is_err() {
                return Err(Error::Internal(format!(
                    "center {} is not a member of its cluster",
                    c.center
                )));
            }
            for &v in &c.members {
                if v >= n || of_vertex[v].is_some() {
                    return Err(Error::Internal(format!(
                        "vertex {v} is out of range or in two clusters"
                    )));
                }
                of_vertex[v] = Some(i);
            }
            index_of[c.center] = Some(i);
        }
        Ok(ClusterPartition {
            n,
            phase,
            clusters,
            of_vertex,
            index_of,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster(&self, idx: usize) -> &Cluster {
        &self.clusters[idx]
    }

    /// Index of the cluster containing `v`.
    pub fn cluster_of(&self, v: usize) -> Option<usize> {
        self.of_vertex[v]
    }

    /// Index of the cluster whose center is `center`.
    pub fn index_of(&self, center: usize) -> Option<usize> {
        self.index_of.get(center).copied().flatten()
    }
}
