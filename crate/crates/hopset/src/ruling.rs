//! Deterministic `(3, 2·log n)`-ruling sets by recursive ID-bit splitting.
//!
//! Candidates are grouped by ID prefix. Going up one bit, each group merges
//! its 0-child `B0` and 1-child `B1`; clusters of `B1` within two virtual
//! hops of any `B0` cluster at that level are knocked out. All knock-outs of
//! one level run as a single multi-source exploration.

use std::collections::{BTreeMap, VecDeque};

use crate::cluster::ClusterPartition;
use crate::exploration::{cluster_bfs, ExplorationCost};
use crate::overlay::Overlay;
use crate::sssp::bounded_bellman_ford;

/// Runs a depth-limited BFS in the virtual graph and reports the IDs of all
/// clusters it reaches (sources included).
pub trait Knockout {
    fn explore(&mut self, sources: &[usize], depth: usize) -> Vec<usize>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct RulingOutcome {
    /// The ruling set, sorted by ID.
    pub set: Vec<usize>,
    /// Union of the group outputs after each level, level 0 first.
    pub levels: Vec<Vec<usize>>,
    pub explorations: usize,
}

/// `bits` is the ID width; every candidate must be below `2^bits`.
pub fn ruling_set<K: Knockout>(candidates: &[usize], bits: u32, knockout: &mut K) -> RulingOutcome {
    let mut w: Vec<usize> = candidates.to_vec();
    w.sort_unstable();
    w.dedup();
    assert!(
        w.last().is_none_or(|&c| bits >= usize::BITS || c >> bits == 0),
        "candidate ID exceeds the {bits}-bit ID space"
    );
    let mut groups: BTreeMap<usize, Vec<usize>> = w.iter().map(|&c| (c, vec![c])).collect();
    let mut levels = vec![w.clone()];
    let mut explorations = 0;
    for _ in 0..bits {
        let mut next: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (prefix, set) in groups {
            let slot = next.entry(prefix >> 1).or_default();
            if prefix & 1 == 0 {
                slot.0 = set;
            } else {
                slot.1 = set;
            }
        }
        let sources: Vec<usize> = next
            .values()
            .filter(|(b0, b1)| !b0.is_empty() && !b1.is_empty())
            .flat_map(|(b0, _)| b0.iter().copied())
            .collect();
        let mut knocked = knockout.explore(&sources, 2);
        explorations += 1;
        knocked.sort_unstable();
        groups = next
            .into_iter()
            .map(|(prefix, (mut b0, b1))| {
                b0.extend(b1.into_iter().filter(|c| knocked.binary_search(c).is_err()));
                b0.sort_unstable();
                (prefix, b0)
            })
            .collect();
        let mut all: Vec<usize> = groups.values().flatten().copied().collect();
        all.sort_unstable();
        levels.push(all);
    }
    let mut set: Vec<usize> = groups.into_values().flatten().collect();
    set.sort_unstable();
    RulingOutcome {
        set,
        levels,
        explorations,
    }
}

/// Knock-outs through the exploration engine on a cluster partition.
pub struct EngineKnockout<'a> {
    pub graph: &'a Overlay,
    pub partition: &'a ClusterPartition,
    pub threshold: f64,
    pub hopbound: u64,
    pub cost: ExplorationCost,
}

impl Knockout for EngineKnockout<'_> {
    fn explore(&mut self, sources: &[usize], depth: usize) -> Vec<usize> {
        let out = cluster_bfs(
            self.graph,
            self.partition,
            sources,
            depth,
            self.threshold,
            self.hopbound,
            false,
        );
        self.cost.add(&out.cost);
        out.detected
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_some())
            .map(|(c, _)| self.partition.cluster(c).center)
            .collect()
    }
}

/// An explicitly materialized unweighted virtual graph on cluster IDs.
#[derive(Clone, Debug, PartialEq)]
pub struct VirtualGraph {
    ids: Vec<usize>,
    adj: BTreeMap<usize, Vec<usize>>,
}

impl VirtualGraph {
    pub fn new(ids: &[usize], edges: &[(usize, usize)]) -> Self {
        let mut adj: BTreeMap<usize, Vec<usize>> = ids.iter().map(|&c| (c, Vec::new())).collect();
        for &(a, b) in edges {
            if a != b {
                adj.get_mut(&a).expect("edge endpoint is a cluster").push(b);
                adj.get_mut(&b).expect("edge endpoint is a cluster").push(a);
            }
        }
        for v in adj.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        VirtualGraph {
            ids: adj.keys().copied().collect(),
            adj,
        }
    }

    /// Brute force: clusters are adjacent iff some member pair is within
    /// `threshold` using at most `hopbound` edges.
    pub fn from_partition(g: &Overlay, p: &ClusterPartition, threshold: f64, hopbound: u64) -> Self {
        let ids: Vec<usize> = p.clusters().iter().map(|c| c.center).collect();
        let mut edges = Vec::new();
        for c in p.clusters() {
            let dv = bounded_bellman_ford(g, &c.members, hopbound, Some(threshold));
            for other in p.clusters() {
                if other.center > c.center && other.members.iter().any(|&v| dv.dist[v] <= threshold) {
                    edges.push((c.center, other.center));
                }
            }
        }
        VirtualGraph::new(&ids, &edges)
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn neighbors(&self, c: usize) -> &[usize] {
        &self.adj[&c]
    }

    /// BFS levels from a source set; clusters out of reach are absent.
    pub fn bfs(&self, sources: &[usize], depth: Option<usize>) -> BTreeMap<usize, usize> {
        let mut dist = BTreeMap::new();
        let mut q = VecDeque::new();
        for &s in sources {
            if dist.insert(s, 0).is_none() {
                q.push_back(s);
            }
        }
        while let Some(c) = q.pop_front() {
            let d = dist[&c];
            if depth.is_some_and(|lim| d >= lim) {
                continue;
            }
            for &x in self.neighbors(c) {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(x) {
                    e.insert(d + 1);
                    q.push_back(x);
                }
            }
        }
        dist
    }
}

impl Knockout for VirtualGraph {
    fn explore(&mut self, sources: &[usize], depth: usize) -> Vec<usize> {
        self.bfs(sources, Some(depth)).into_keys().collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RulingReport {
    /// Smallest virtual distance between two members of `Q` (`None` when
    /// `|Q| < 2` or all pairs are disconnected).
    pub min_separation: Option<usize>,
    /// Largest distance from a member of `W` to `Q`.
    pub max_cover: usize,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RulingViolation {
    #[error("separation: clusters {a} and {b} are at virtual distance {dist} < 3")]
    Separation { a: usize, b: usize, dist: usize },
    #[error("covering: cluster {cluster} is {} from the ruling set (allowed {limit})",
        .dist.map_or("unreachable".to_string(), |d| d.to_string()))]
    Covering {
        cluster: usize,
        dist: Option<usize>,
        limit: usize,
    },
    #[error("ruling set member {0} is not a candidate")]
    NotCandidate(usize),
}

/// Checks `q` against `w` on an explicit virtual graph: pairwise distance at
/// least 3 and every candidate within `2·log_n` of `q`.
pub fn verify_ruling(q: &[usize], w: &[usize], vg: &VirtualGraph, log_n: u32) -> Result<RulingReport, RulingViolation> {
    let limit = 2 * log_n as usize;
    let mut min_separation: Option<usize> = None;
    for (i, &a) in q.iter().enumerate() {
        if !w.contains(&a) {
            return Err(RulingViolation::NotCandidate(a));
        }
        let dist = vg.bfs(&[a], Some(2));
        for &b in &q[i + 1..] {
            if let Some(&d) = dist.get(&b) {
                return Err(RulingViolation::Separation { a, b, dist: d });
            }
        }
        let far = vg.bfs(&[a], None);
        for &b in &q[i + 1..] {
            if let Some(&d) = far.get(&b) {
                min_separation = Some(min_separation.map_or(d, |m| m.min(d)));
            }
        }
    }
    let cover = vg.bfs(q, None);
    let mut max_cover = 0;
    for &c in w {
        match cover.get(&c) {
            Some(&d) if d <= limit => max_cover = max_cover.max(d),
            other => {
                return Err(RulingViolation::Covering {
                    cluster: c,
                    dist: other.copied(),
                    limit,
                })
            }
        }
    }
    Ok(RulingReport {
        min_separation,
        max_cover,
    })
}
