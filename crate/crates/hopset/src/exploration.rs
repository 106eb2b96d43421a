//! Limited BFS explorations over the virtual cluster graph.
//!
//! Two clusters are adjacent in the virtual graph when some pair of their
//! vertices is within `threshold` using at most `hopbound` edges of the
//! underlying graph. A pulse simulates one virtual hop: every vertex of a
//! cluster that already holds records starts from them at distance 0, the
//! records spread for up to `hopbound` synchronous steps (each vertex keeps
//! the `width` closest sources it has seen), and each cluster then collects
//! the best records of its vertices.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::cluster::ClusterPartition;
use crate::memory::MemoryPath;
use crate::overlay::Overlay;

const NONE: u32 = u32::MAX;
const PAR_MIN: usize = 512;

/// A `(source cluster, distance)` pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Record {
    pub source: usize,
    pub dist: f64,
}

/// Keeps the smallest distance per source, then orders by distance with ties
/// by source ID.
pub fn sort_dedup(records: &[Record]) -> Vec<Record> {
    let mut r = records.to_vec();
    r.sort_by(|a, b| a.source.cmp(&b.source).then(a.dist.total_cmp(&b.dist)));
    r.dedup_by_key(|x| x.source);
    r.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.source.cmp(&b.source)));
    r
}

/// One cell of a cluster table `m(C)`: a source cluster, its distance and
/// the member vertex where the best record landed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub source: usize,
    pub dist: f64,
    pub landing: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExplorationParams {
    pub threshold: f64,
    pub hopbound: u64,
    /// Records kept per vertex and per cluster (`x`).
    pub width: usize,
    /// Number of pulses (`d`).
    pub depth: usize,
}

/// Round and work counters. `nominal_steps` counts every pulse at its full
/// `hopbound`; `executed_steps` stops counting once a propagation settles,
/// after which further steps cannot change any list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExplorationCost {
    pub pulses: u64,
    pub nominal_steps: u128,
    pub executed_steps: u64,
    pub work: u64,
}

impl ExplorationCost {
    pub fn add(&mut self, o: &ExplorationCost) {
        self.pulses += o.pulses;
        self.nominal_steps = self.nominal_steps.saturating_add(o.nominal_steps);
        self.executed_steps += o.executed_steps;
        self.work += o.work;
    }
}

#[derive(Clone, Debug)]
pub struct ExplorationResult {
    pub params: ExplorationParams,
    /// `m(C)` per cluster index.
    pub tables: Vec<Vec<Entry>>,
    /// Pulse at which each cluster first held a record (0 for sources).
    pub detected_at: Vec<Option<usize>>,
    pub cost: ExplorationCost,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Msg {
    source: u32,
    dist: f64,
    pred: u32,
    born: u32,
}

fn msg_key(a: &Msg, b: &Msg) -> Ordering {
    a.source
        .cmp(&b.source)
        .then(a.dist.total_cmp(&b.dist))
        .then(a.born.cmp(&b.born))
        .then(a.pred.cmp(&b.pred))
}

fn finish_list(mut cand: Vec<Msg>, width: usize) -> Vec<Msg> {
    cand.sort_by(msg_key);
    cand.dedup_by_key(|m| m.source);
    cand.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.source.cmp(&b.source)));
    cand.truncate(width);
    cand
}

/// Per-vertex list snapshots of the last pulse, used to rebuild the path of
/// any record.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    history: Vec<Vec<(u32, Vec<Msg>)>>,
}

impl Trace {
    fn list_at(&self, v: usize, step: u32) -> &[Msg] {
        let h = &self.history[v];
        let pos = h.partition_point(|(s, _)| *s <= step);
        if pos == 0 {
            &[]
        } else {
            &h[pos - 1].1
        }
    }

    /// Path from the vertex where the record of `source` (a cluster index)
    /// originated to `landing`, along the edges it travelled.
    pub fn path(&self, g: &Overlay, landing: usize, source: usize) -> Option<MemoryPath> {
        let src = source as u32;
        let mut vertices = vec![landing];
        let mut hops = Vec::new();
        let mut u = landing;
        let mut step = u32::MAX;
        loop {
            let m = *self.list_at(u, step).iter().find(|m| m.source == src)?;
            if m.pred == NONE {
                break;
            }
            let y = m.pred as usize;
            let (w, link) = g.link(y, u)?;
            vertices.push(y);
            hops.push((link, w));
            u = y;
            step = m.born - 1;
        }
        vertices.reverse();
        hops.reverse();
        Some(MemoryPath { vertices, hops })
    }
}

struct Engine<'a> {
    g: &'a Overlay,
    p: &'a ClusterPartition,
    params: ExplorationParams,
    trace: bool,
    lists: Vec<Vec<Msg>>,
    history: Vec<Vec<(u32, Vec<Msg>)>>,
    cost: ExplorationCost,
}

impl<'a> Engine<'a> {
    fn new(g: &'a Overlay, p: &'a ClusterPartition, params: ExplorationParams, trace: bool) -> Self {
        let n = g.n();
        Engine {
            g,
            p,
            params,
            trace,
            lists: vec![Vec::new(); n],
            history: if trace { vec![Vec::new(); n] } else { Vec::new() },
            cost: ExplorationCost::default(),
        }
    }

    fn relax(&self, u: usize, step: u32) -> (Vec<Msg>, u64) {
        let mut cand: Vec<Msg> = self.lists[u].clone();
        let mut work = 0u64;
        for (y, w, _) in self.g.row(u) {
            for m in &self.lists[y] {
                work += 1;
                let d = m.dist + w;
                if d <= self.params.threshold {
                    cand.push(Msg {
                        source: m.source,
                        dist: d,
                        pred: y as u32,
                        born: step,
                    });
                }
            }
        }
        (finish_list(cand, self.params.width), work)
    }

    /// Runs one pulse from the cluster tables `m` (indexed by cluster) and
    /// returns the aggregated tables.
    fn pulse(&mut self, m: &[Vec<Entry>]) -> Vec<Vec<Entry>> {
        let n = self.g.n();
        let width = self.params.width;
        self.cost.pulses += 1;
        for v in 0..n {
            self.lists[v].clear();
            if let Some(c) = self.p.cluster_of(v) {
                for e in m[c].iter().take(width) {
                    let src = self.p.index_of(e.source).expect("source is a cluster");
                    self.lists[v].push(Msg {
                        source: src as u32,
                        dist: 0.0,
                        pred: NONE,
                        born: 0,
                    });
                }
            }
        }
        if self.trace {
            for v in 0..n {
                self.history[v].clear();
                if !self.lists[v].is_empty() {
                    self.history[v].push((0, self.lists[v].clone()));
                }
            }
        }

        let mut dirty: Vec<usize> = (0..n).filter(|&v| !self.lists[v].is_empty()).collect();
        let mut mark = vec![false; n];
        let mut step: u64 = 0;
        while step < self.params.hopbound && !dirty.is_empty() {
            step += 1;
            let s32 = step.min(u32::MAX as u64 - 1) as u32;
            let mut affected = Vec::new();
            for &u in &dirty {
                if !mark[u] {
                    mark[u] = true;
                    affected.push(u);
                }
                for (y, _, _) in self.g.row(u) {
                    if !mark[y] {
                        mark[y] = true;
                        affected.push(y);
                    }
                }
            }
            affected.sort_unstable();
            for &u in &affected {
                mark[u] = false;
            }
            let this = &*self;
            let updates: Vec<(usize, Vec<Msg>, u64)> = if affected.len() >= PAR_MIN {
                affected
                    .par_iter()
                    .map(|&u| {
                        let (l, w) = this.relax(u, s32);
                        (u, l, w)
                    })
                    .collect()
            } else {
                affected
                    .iter()
                    .map(|&u| {
                        let (l, w) = this.relax(u, s32);
                        (u, l, w)
                    })
                    .collect()
            };
            dirty.clear();
            for (u, list, w) in updates {
                self.cost.work += w;
                if list != self.lists[u] {
                    if self.trace {
                        self.history[u].push((s32, list.clone()));
                    }
                    self.lists[u] = list;
                    dirty.push(u);
                }
            }
        }
        self.cost.executed_steps += step;
        self.cost.nominal_steps = self
            .cost
            .nominal_steps
            .saturating_add(self.params.hopbound as u128);

        let mut out = Vec::with_capacity(self.p.len());
        for c in self.p.clusters() {
            let mut entries: Vec<Entry> = Vec::new();
            for &v in &c.members {
                for msg in &self.lists[v] {
                    entries.push(Entry {
                        source: self.p.cluster(msg.source as usize).center,
                        dist: msg.dist,
                        landing: v,
                    });
                }
            }
            entries.sort_by(|a, b| {
                a.source
                    .cmp(&b.source)
                    .then(a.dist.total_cmp(&b.dist))
                    .then(a.landing.cmp(&b.landing))
            });
            entries.dedup_by_key(|e| e.source);
            entries.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.source.cmp(&b.source)));
            entries.truncate(width);
            out.push(entries);
        }
        out
    }

    fn take_trace(&mut self) -> Trace {
        Trace {
            history: std::mem::take(&mut self.history),
        }
    }

    fn trace_ref(&self) -> Trace {
        Trace {
            history: self.history.clone(),
        }
    }
}

fn initial_tables(p: &ClusterPartition, sources: &[usize]) -> Vec<Vec<Entry>> {
    let mut m = vec![Vec::new(); p.len()];
    for &s in sources {
        let i = p.index_of(s).expect("source must be a cluster center");
        m[i] = vec![Entry {
            source: s,
            dist: 0.0,
            landing: s,
        }];
    }
    m
}

/// Runs `depth` pulses from the source clusters and returns every cluster
/// table.
pub fn limited_bfs(g: &Overlay, p: &ClusterPartition, sources: &[usize], params: ExplorationParams) -> ExplorationResult {
    assert!(params.width >= 1 && params.depth >= 1 && params.threshold > 0.0);
    let mut eng = Engine::new(g, p, params, false);
    let mut m = initial_tables(p, sources);
    let mut detected_at: Vec<Option<usize>> = m.iter().map(|t| (!t.is_empty()).then_some(0)).collect();
    for pulse in 1..=params.depth {
        m = eng.pulse(&m);
        for (c, t) in m.iter().enumerate() {
            if detected_at[c].is_none() && !t.is_empty() {
                detected_at[c] = Some(pulse);
            }
        }
    }
    ExplorationResult {
        params,
        tables: m,
        detected_at,
        cost: eng.cost,
    }
}

/// Outcome of popular-cluster detection.
#[derive(Clone, Debug)]
pub struct Popularity {
    /// IDs of clusters with at least `deg` neighbors.
    pub popular: Vec<usize>,
    /// For every other cluster, its complete neighbor list (itself
    /// excluded), indexed by cluster index.
    pub neighbors: Vec<Option<Vec<Entry>>>,
    pub cost: ExplorationCost,
    pub trace: Option<Trace>,
}

/// One pulse from every cluster with `width = deg + 1`. A cluster is popular
/// iff its table fills all `deg + 1` cells (itself plus `deg` neighbors).
pub fn detect_popular(
    g: &Overlay,
    p: &ClusterPartition,
    deg: usize,
    threshold: f64,
    hopbound: u64,
    trace: bool,
) -> Popularity {
    let params = ExplorationParams {
        threshold,
        hopbound,
        width: deg + 1,
        depth: 1,
    };
    let sources: Vec<usize> = p.clusters().iter().map(|c| c.center).collect();
    let mut eng = Engine::new(g, p, params, trace);
    let tables = if p.is_empty() {
        Vec::new()
    } else {
        eng.pulse(&initial_tables(p, &sources))
    };
    let mut popular = Vec::new();
    let mut neighbors = Vec::with_capacity(p.len());
    for (c, t) in tables.into_iter().enumerate() {
        let center = p.cluster(c).center;
        if t.len() >= deg + 1 {
            popular.push(center);
            neighbors.push(None);
        } else {
            neighbors.push(Some(t.into_iter().filter(|e| e.source != center).collect()));
        }
    }
    Popularity {
        popular,
        neighbors,
        cost: eng.cost,
        trace: trace.then(|| eng.take_trace()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    /// ID of the source cluster that claimed this cluster.
    pub source: usize,
    pub pulse: usize,
    /// Distance within the detecting pulse.
    pub dist: f64,
    pub landing: usize,
    /// Walk from a vertex of a cluster detected one pulse earlier to
    /// `landing`; absent for sources and for untraced runs.
    pub link: Option<MemoryPath>,
}

#[derive(Clone, Debug)]
pub struct BfsOutcome {
    /// Per cluster index.
    pub detected: Vec<Option<Detection>>,
    pub cost: ExplorationCost,
}

/// Multi-source BFS to `depth` virtual hops with one record per vertex.
/// Each cluster reports the source that reached it first, preferring the
/// smaller distance and then the smaller ID within that pulse.
pub fn cluster_bfs(
    g: &Overlay,
    p: &ClusterPartition,
    sources: &[usize],
    depth: usize,
    threshold: f64,
    hopbound: u64,
    trace: bool,
) -> BfsOutcome {
    let params = ExplorationParams {
        threshold,
        hopbound,
        width: 1,
        depth,
    };
    let mut detected: Vec<Option<Detection>> = vec![None; p.len()];
    let mut m = initial_tables(p, sources);
    for &s in sources {
        let i = p.index_of(s).expect("source must be a cluster center");
        detected[i] = Some(Detection {
            source: s,
            pulse: 0,
            dist: 0.0,
            landing: s,
            link: None,
        });
    }
    let mut eng = Engine::new(g, p, params, trace);
    let mut pulse = 0;
    while pulse < depth && !sources.is_empty() {
        pulse += 1;
        let next = eng.pulse(&m);
        let tr = trace.then(|| eng.trace_ref());
        let mut fresh = false;
        for (c, t) in next.into_iter().enumerate() {
            if detected[c].is_some() || t.is_empty() {
                continue;
            }
            let e = t[0];
            let link = tr.as_ref().map(|tr| {
                let src = p.index_of(e.source).expect("source is a cluster");
                tr.path(g, e.landing, src).expect("traced record has a path")
            });
            detected[c] = Some(Detection {
                source: e.source,
                pulse,
                dist: e.dist,
                landing: e.landing,
                link,
            });
            m[c] = t;
            fresh = true;
        }
        if !fresh {
            // the emitting set is unchanged, so later pulses repeat this one
            break;
        }
    }
    let skipped = depth - pulse;
    let mut cost = eng.cost;
    cost.nominal_steps = cost
        .nominal_steps
        .saturating_add((skipped as u128).saturating_mul(hopbound as u128));
    cost.pulses += skipped as u64;
    BfsOutcome { detected, cost }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn overlay(n: usize, edges: &[(usize, usize, f64)]) -> Overlay {
        Overlay::new(&Graph::new(n, edges.iter().copied()).unwrap(), [])
    }

    #[test]
    fn sort_dedup_examples() {
        let r = |s, d| Record { source: s, dist: d };
        assert_eq!(sort_dedup(&[r(5, 3.0), r(5, 1.0), r(2, 4.0)]), vec![r(5, 1.0), r(2, 4.0)]);
        assert_eq!(sort_dedup(&[]), vec![]);
        assert_eq!(sort_dedup(&[r(1, 2.0), r(1, 2.0)]), vec![r(1, 2.0)]);
    }

    #[test]
    fn one_pulse_on_a_path() {
        let g = overlay(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let p = ClusterPartition::singletons(3);
        let params = ExplorationParams { threshold: 10.0, hopbound: 3, width: 1, depth: 1 };
        let r = limited_bfs(&g, &p, &[0], params);
        assert_eq!((r.tables[1][0].source, r.tables[1][0].dist), (0, 1.0));
        assert_eq!((r.tables[2][0].source, r.tables[2][0].dist), (0, 2.0));
        assert_eq!(r.cost.nominal_steps, 3);
    }

    #[test]
    fn threshold_excludes_neighbors() {
        let g = overlay(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let p = ClusterPartition::singletons(3);
        let params = ExplorationParams { threshold: 0.5, hopbound: 3, width: 1, depth: 1 };
        let r = limited_bfs(&g, &p, &[0, 1, 2], params);
        for c in 0..3 {
            assert_eq!(r.tables[c].len(), 1);
            assert_eq!((r.tables[c][0].source, r.tables[c][0].dist), (c, 0.0));
        }
    }

    #[test]
    fn star_tables_are_complete() {
        let g = overlay(5, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)]);
        let p = ClusterPartition::singletons(5);
        let params = ExplorationParams { threshold: 2.0, hopbound: 3, width: 5, depth: 1 };
        let r = limited_bfs(&g, &p, &[0, 1, 2, 3, 4], params);
        for c in 0..5 {
            assert_eq!(r.tables[c].len(), 5);
            for e in &r.tables[c] {
                let expect = if e.source == c { 0.0 } else if c == 0 || e.source == 0 { 1.0 } else { 2.0 };
                assert_eq!(e.dist, expect);
            }
        }
    }

    #[test]
    fn popularity_examples() {
        let star = overlay(6, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0), (0, 5, 1.0)]);
        let pop = detect_popular(&star, &ClusterPartition::singletons(6), 3, 2.0, 3, false);
        assert_eq!(pop.popular, vec![0, 1, 2, 3, 4, 5]);

        let path = overlay(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        let pop = detect_popular(&path, &ClusterPartition::singletons(3), 3, 1.0, 3, false);
        assert!(pop.popular.is_empty());
        let sizes: Vec<usize> = pop.neighbors.iter().map(|t| t.as_ref().unwrap().len()).collect();
        assert_eq!(sizes, vec![1, 2, 1]);

        let single = overlay(1, &[]);
        let pop = detect_popular(&single, &ClusterPartition::singletons(1), 3, 1.0, 3, false);
        assert!(pop.popular.is_empty());
        assert_eq!(pop.neighbors, vec![Some(vec![])]);
    }

    #[test]
    fn bfs_on_a_path_of_clusters() {
        let g = overlay(5, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]);
        let p = ClusterPartition::singletons(5);
        let out = cluster_bfs(&g, &p, &[0], 2, 1.0, 1, true);
        let got: Vec<Option<usize>> = out.detected.iter().map(|d| d.as_ref().map(|d| d.pulse)).collect();
        assert_eq!(got, vec![Some(0), Some(1), Some(2), None, None]);
        let link = out.detected[2].as_ref().unwrap().link.clone().unwrap();
        assert_eq!(link.vertices, vec![1, 2]);
        assert_eq!(out.cost.nominal_steps, 2);

        let none = cluster_bfs(&g, &p, &[], 2, 1.0, 1, false);
        assert!(none.detected.iter().all(|d| d.is_none()));

        let all: Vec<usize> = (0..5).collect();
        let zero = cluster_bfs(&g, &p, &all, 0, 1.0, 1, false);
        for (c, d) in zero.detected.iter().enumerate() {
            assert_eq!(d.as_ref().unwrap().source, c);
        }
    }

    #[test]
    fn traced_paths_replay() {
        let g = overlay(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 5.0)]);
        let p = ClusterPartition::singletons(4);
        let pop = detect_popular(&g, &p, 3, 10.0, 3, true);
        let tr = pop.trace.unwrap();
        let path = tr.path(&g, 3, 0).unwrap();
        assert_eq!(path.vertices, vec![0, 1, 2, 3]);
        assert_eq!(path.weight(), 4.0);
        let path = tr.path(&g, 2, 0).unwrap();
        assert_eq!(path.vertices, vec![0, 1, 2]);
        assert_eq!(path.weight(), 3.0);
    }
}
