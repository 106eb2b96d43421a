//! Single-scale and multi-scale hopset construction.
//!
//! Scale `k` handles pairs at distance `(2^k, 2^{k+1}]` (in units of the
//! shortest edge). It starts from singleton clusters and runs `ℓ + 1`
//! phases over `G_{k-1} = E ∪ H_{k-1}`. In phase `i < ℓ`, clusters with many
//! close neighbors are popular; a ruling set of them grows superclusters by
//! BFS and every absorbed cluster gets a superclustering edge to its new
//! center. Clusters left out connect directly to their close unclustered
//! neighbors (interconnection). Phase `ℓ` only interconnects.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cluster::{Cluster, ClusterPartition};
use crate::error::{Error, Result};
use crate::exploration::{cluster_bfs, detect_popular, ExplorationCost};
use crate::graph::Graph;
use crate::memory::MemoryPath;
use crate::overlay::{Link, Overlay};
use crate::reduction::ReducedMeta;
use crate::ruling::{ruling_set, EngineKnockout};
use crate::schedule::{compute_schedule, EpsilonMode, ParameterSchedule};
use crate::sssp::aspect_ratio;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopsetParams {
    pub epsilon: f64,
    pub kappa: u32,
    pub rho: f64,
    pub mode: EpsilonMode,
    /// Use this aspect ratio instead of computing it from all-pairs
    /// distances.
    pub aspect_ratio: Option<f64>,
}

impl HopsetParams {
    pub fn new(epsilon: f64, kappa: u32, rho: f64, mode: EpsilonMode) -> Self {
        HopsetParams {
            epsilon,
            kappa,
            rho,
            mode,
            aspect_ratio: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildOptions {
    /// Store a memory path with every edge (needed for tree extraction).
    pub memory: bool,
    /// Fail if a stored memory path would exceed this many hops.
    pub max_memory_hops: Option<usize>,
    /// Keep every phase partition for inspection.
    pub audit: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            memory: true,
            max_memory_hops: None,
            audit: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    Supercluster,
    Interconnect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopsetEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    pub kind: EdgeKind,
    pub phase: usize,
    /// Walk from `u` to `v` over `E ∪ H_{k-1}`.
    pub memory: Option<MemoryPath>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseStats {
    pub phase: usize,
    pub clusters: usize,
    pub popular: usize,
    pub ruling: usize,
    pub superclusters: usize,
    pub unclustered: usize,
    pub supercluster_edges: usize,
    /// Interconnection edges counted once per adding cluster.
    pub interconnect_edges: usize,
    /// Fewest clusters merged into one supercluster.
    pub min_supercluster_size: Option<usize>,
    pub popular_superclustered: bool,
    pub deg: f64,
    pub rounds: u128,
    pub executed_steps: u64,
    pub work: u64,
    /// Heaviest cluster memory path at the end of the phase.
    pub max_memory_radius: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LayerStats {
    pub phases: Vec<PhaseStats>,
    pub rounds: u128,
    pub executed_steps: u64,
    pub work: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopsetLayer {
    /// Reduction family this layer belongs to (`None` for direct builds).
    /// Family layers are stored over the original vertices: node endpoints
    /// are replaced by node centers.
    pub family: Option<usize>,
    pub scale: i64,
    /// Index of the layer this one was built on.
    pub prev: Option<usize>,
    pub edges: Vec<HopsetEdge>,
    pub stats: LayerStats,
}

/// Partitions `P_0 ..= P_ℓ` of one scale.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleAudit {
    pub scale: i64,
    pub partitions: Vec<Vec<Cluster>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HopsetMode {
    Direct,
    Reduced,
}

/// A complete hopset plus everything needed to query it and to turn query
/// trees into trees over the original graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hopset {
    pub format_version: u32,
    pub n: usize,
    pub graph_checksum: String,
    pub mode: HopsetMode,
    pub params: HopsetParams,
    /// Schedule of a direct build.
    pub schedule: Option<ParameterSchedule>,
    pub layers: Vec<HopsetLayer>,
    pub reduced: Option<ReducedMeta>,
    /// Hop limit for queries.
    pub hopbound: u64,
    /// Stretch guaranteed by the schedule.
    pub stretch_bound: f64,
    pub memory: bool,
}

impl Hopset {
    /// Hopset edges mapped to the original vertex set.
    pub fn overlay_edges(&self) -> Vec<(usize, usize, f64, Link)> {
        let mut out = Vec::new();
        for (li, layer) in self.layers.iter().enumerate() {
            for (ei, e) in layer.edges.iter().enumerate() {
                out.push((e.u, e.v, e.weight, Link::Hop { layer: li, edge: ei }));
            }
        }
        if let Some(r) = &self.reduced {
            for (si, s) in r.stars.iter().enumerate() {
                out.push((s.center, s.member, s.weight, Link::Star(si)));
            }
        }
        out
    }

    pub fn overlay(&self, g: &Graph) -> Overlay {
        Overlay::new(g, self.overlay_edges())
    }

    /// Weight of any link that can appear in a tree or memory path.
    pub fn link_weight(&self, g: &Graph, link: Link) -> f64 {
        match link {
            Link::Edge(e) => g.edge(e).w,
            Link::Hop { layer, edge } => self.layers[layer].edges[edge].weight,
            Link::Star(i) => self.reduced.as_ref().expect("reduced hopset").stars[i].weight,
            Link::Super { family, edge } => {
                self.reduced.as_ref().expect("reduced hopset").families[family].superedges[edge].weight
            }
        }
    }

    /// Endpoints of a link over the original vertices.
    pub fn link_ends(&self, g: &Graph, link: Link) -> (usize, usize) {
        match link {
            Link::Edge(e) => (g.edge(e).u, g.edge(e).v),
            Link::Hop { layer, edge } => {
                let e = &self.layers[layer].edges[edge];
                (e.u, e.v)
            }
            Link::Star(i) => {
                let s = &self.reduced.as_ref().expect("reduced hopset").stars[i];
                (s.center, s.member)
            }
            Link::Super { family, edge } => {
                let f = &self.reduced.as_ref().expect("reduced hopset").families[family];
                let se = &f.superedges[edge];
                (f.centers[se.x], f.centers[se.y])
            }
        }
    }

    /// Checks that every stored memory path is a walk between the edge's
    /// endpoints whose links have the recorded weights and whose total does
    /// not exceed the edge weight. Returns the largest hop count seen.
    pub fn replay_memory(&self, g: &Graph, tol: f64) -> Result<usize> {
        let mut max_hops = 0;
        for (li, layer) in self.layers.iter().enumerate() {
            for (ei, e) in layer.edges.iter().enumerate() {
                let fail = |msg: String| Err(Error::Internal(format!("layer {li} edge {ei}: {msg}")));
                let Some(m) = &e.memory else {
                    return fail("no memory path".into());
                };
                if m.first() != e.u || m.last() != e.v {
                    return fail("memory path does not join the edge endpoints".into());
                }
                let mut total = 0.0;
                for (j, &(link, w)) in m.hops.iter().enumerate() {
                    let (a, b) = self.link_ends(g, link);
                    let (x, y) = (m.vertices[j], m.vertices[j + 1]);
                    if !((a == x && b == y) || (a == y && b == x)) {
                        return fail(format!("hop {j} does not match its link"));
                    }
                    if let Link::Hop { layer, .. } = link {
                        if layer >= li {
                            return fail(format!("hop {j} refers to layer {layer}"));
                        }
                    }
                    let lw = self.link_weight(g, link);
                    if (lw - w).abs() > tol * lw {
                        return fail(format!("hop {j} records weight {w}, link weighs {lw}"));
                    }
                    total += lw;
                }
                if total > e.weight * (1.0 + tol) {
                    return fail(format!("replayed weight {total} exceeds {}", e.weight));
                }
                max_hops = max_hops.max(m.hop_count());
            }
        }
        Ok(max_hops)
    }

    pub fn edge_count(&self) -> usize {
        self.layers.iter().map(|l| l.edges.len()).sum::<usize>()
            + self.reduced.as_ref().map_or(0, |r| r.stars.len())
    }

    pub fn check_graph(&self, g: &Graph) -> Result<()> {
        let found = g.checksum();
        if found != self.graph_checksum || g.n() != self.n {
            return Err(Error::Mismatch {
                expected: self.graph_checksum.clone(),
                found,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let h: Hopset = serde_json::from_str(s)?;
        if h.format_version != FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported hopset format version {}",
                h.format_version
            )));
        }
        Ok(h)
    }

    pub fn rounds(&self) -> u128 {
        self.layers
            .iter()
            .fold(0u128, |a, l| a.saturating_add(l.stats.rounds))
    }

    pub fn work(&self) -> u64 {
        self.layers.iter().map(|l| l.stats.work).sum()
    }
}

fn check_memory(path: &MemoryPath, weight: f64, opts: &BuildOptions) -> Result<()> {
    if let Some(cap) = opts.max_memory_hops {
        if path.hop_count() > cap {
            return Err(Error::Config(format!(
                "memory path with {} hops exceeds the cap of {cap}",
                path.hop_count()
            )));
        }
    }
    let w = path.weight();
    if w > weight * (1.0 + 1e-9) {
        return Err(Error::Internal(format!(
            "memory path weight {w} exceeds its edge weight {weight}"
        )));
    }
    Ok(())
}

fn insert_edge(set: &mut BTreeMap<(usize, usize), HopsetEdge>, mut e: HopsetEdge) {
    if e.u > e.v {
        std::mem::swap(&mut e.u, &mut e.v);
        e.memory = e.memory.map(|m| m.reversed());
    }
    match set.get(&(e.u, e.v)) {
        Some(old) if old.weight <= e.weight => {}
        _ => {
            set.insert((e.u, e.v), e);
        }
    }
}

fn join(parts: &[&MemoryPath]) -> MemoryPath {
    let mut p = parts[0].clone();
    for q in &parts[1..] {
        p.append(q);
    }
    p.loop_erase();
    p
}

/// Builds `H_k` on top of `prev` (the layer `H_{k-1}` stored at index
/// `prev_index`).
pub fn build_single_scale(
    g: &Graph,
    prev: Option<(&HopsetLayer, usize)>,
    k: i64,
    sched: &ParameterSchedule,
    opts: &BuildOptions,
) -> Result<(HopsetLayer, ScaleAudit)> {
    let n = g.n();
    let sp = sched.scale(k);
    let hop = sched.exploration_hopbound();
    let log_n = sched.log_n;
    let memory = opts.memory;
    let extra: Vec<(usize, usize, f64, Link)> = match prev {
        Some((layer, li)) => layer
            .edges
            .iter()
            .enumerate()
            .map(|(ei, e)| (e.u, e.v, e.weight, Link::Hop { layer: li, edge: ei }))
            .collect(),
        None => Vec::new(),
    };
    let overlay = Overlay::new(g, extra);

    let mut part = ClusterPartition::singletons(n);
    let mut cp: Vec<Option<MemoryPath>> = if memory {
        (0..n).map(|v| Some(MemoryPath::trivial(v))).collect()
    } else {
        Vec::new()
    };
    let mut edges: BTreeMap<(usize, usize), HopsetEdge> = BTreeMap::new();
    let mut stats = LayerStats::default();
    let mut audit = ScaleAudit {
        scale: k,
        partitions: Vec::new(),
    };

    for i in 0..=sched.ell {
        if opts.audit {
            audit.partitions.push(part.clusters().to_vec());
        }
        let thr = sp.delta_hat[i];
        let deg = sched.deg_cap[i];
        let mut ps = PhaseStats {
            phase: i,
            clusters: part.len(),
            deg: sched.deg[i],
            popular_superclustered: true,
            ..Default::default()
        };
        let mut cost = ExplorationCost::default();

        let pop = detect_popular(&overlay, &part, deg, thr, hop, memory);
        cost.add(&pop.cost);
        ps.popular = pop.popular.len();

        let mut unclustered = vec![false; part.len()];
        let mut next: Vec<Cluster> = Vec::new();
        if i < sched.ell {
            let mut ko = EngineKnockout {
                graph: &overlay,
                partition: &part,
                threshold: thr,
                hopbound: hop,
                cost: ExplorationCost::default(),
            };
            let rs = ruling_set(&pop.popular, log_n, &mut ko);
            cost.add(&ko.cost);
            ps.ruling = rs.set.len();

            let bfs = cluster_bfs(&overlay, &part, &rs.set, 2 * log_n as usize, thr, hop, memory);
            cost.add(&bfs.cost);

            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            let mut order: Vec<(usize, usize)> = Vec::new();
            for (c, d) in bfs.detected.iter().enumerate() {
                match d {
                    Some(d) => {
                        groups.entry(d.source).or_default().push(c);
                        order.push((d.pulse, c));
                    }
                    None => unclustered[c] = true,
                }
            }
            for &w in &pop.popular {
                let c = part.index_of(w).expect("popular cluster exists");
                if unclustered[c] {
                    ps.popular_superclustered = false;
                }
            }

            // walk from each detected cluster's center to its new center
            order.sort_unstable();
            let w_sc = sp.supercluster_weight(i, log_n);
            let mut to_center: Vec<Option<MemoryPath>> = vec![None; part.len()];
            for &(pulse, c) in &order {
                let center = part.cluster(c).center;
                let d = bfs.detected[c].as_ref().expect("detected");
                if memory {
                    let path = if pulse == 0 {
                        MemoryPath::trivial(center)
                    } else {
                        let link = d.link.as_ref().expect("traced detection");
                        let origin = link.first();
                        let prev_c = part.cluster_of(origin).expect("origin is clustered");
                        let rest = to_center[prev_c]
                            .as_ref()
                            .ok_or_else(|| Error::Internal("BFS chain out of order".into()))?;
                        let landing_cp = cp[d.landing].as_ref().expect("clustered vertex memory");
                        let origin_cp = cp[origin].as_ref().expect("clustered vertex memory");
                        join(&[&landing_cp.reversed(), &link.reversed(), origin_cp, rest])
                    };
                    to_center[c] = Some(path);
                }
                if pulse > 0 {
                    let mem = if memory { to_center[c].clone() } else { None };
                    if let Some(m) = &mem {
                        check_memory(m, w_sc, opts)?;
                    }
                    ps.supercluster_edges += 1;
                    insert_edge(
                        &mut edges,
                        HopsetEdge {
                            u: center,
                            v: d.source,
                            weight: w_sc,
                            kind: EdgeKind::Supercluster,
                            phase: i,
                            memory: mem,
                        },
                    );
                }
            }

            for (src, members) in &groups {
                let mut all = Vec::new();
                for &c in members {
                    let cl = part.cluster(c);
                    if memory {
                        let tail = to_center[c].as_ref().expect("memory computed");
                        for &v in &cl.members {
                            let head = cp[v].as_ref().expect("clustered vertex memory");
                            cp[v] = Some(join(&[head, tail]));
                        }
                    }
                    all.extend_from_slice(&cl.members);
                }
                ps.min_supercluster_size = Some(
                    ps.min_supercluster_size
                        .map_or(members.len(), |m| m.min(members.len())),
                );
                next.push(Cluster {
                    center: *src,
                    members: all,
                });
            }
            ps.superclusters = next.len();
        } else {
            if !pop.popular.is_empty() {
                return Err(Error::Internal(format!(
                    "{} popular clusters remain in the last phase",
                    pop.popular.len()
                )));
            }
            unclustered.iter_mut().for_each(|u| *u = true);
        }

        // interconnection among clusters left out in this phase
        let r2 = 2.0 * sp.radius[i];
        for c in 0..part.len() {
            if !unclustered[c] {
                continue;
            }
            ps.unclustered += 1;
            let center = part.cluster(c).center;
            let table = pop.neighbors[c]
                .as_ref()
                .ok_or_else(|| Error::Internal(format!("cluster {center} left out while popular")))?;
            for e in table {
                let other = part.index_of(e.source).expect("neighbor is a cluster");
                if !unclustered[other] {
                    continue;
                }
                let weight = e.dist + r2;
                let mem = if memory {
                    let tr = pop.trace.as_ref().expect("traced popularity");
                    let walk = tr
                        .path(&overlay, e.landing, other)
                        .ok_or_else(|| Error::Internal("lost exploration record".into()))?;
                    let landing_cp = cp[e.landing].as_ref().expect("clustered vertex memory");
                    let origin_cp = cp[walk.first()].as_ref().expect("clustered vertex memory");
                    let m = join(&[&landing_cp.reversed(), &walk.reversed(), origin_cp]);
                    check_memory(&m, weight, opts)?;
                    Some(m)
                } else {
                    None
                };
                ps.interconnect_edges += 1;
                insert_edge(
                    &mut edges,
                    HopsetEdge {
                        u: center,
                        v: e.source,
                        weight,
                        kind: EdgeKind::Interconnect,
                        phase: i,
                        memory: mem,
                    },
                );
            }
        }

        ps.rounds = cost
            .nominal_steps
            .saturating_add(cost.pulses as u128 * (log_n as u128 + 1))
            .saturating_add(2 * log_n as u128);
        ps.executed_steps = cost.executed_steps;
        ps.work = cost.work + (ps.supercluster_edges + ps.interconnect_edges) as u64;
        if memory {
            ps.max_memory_radius = cp
                .iter()
                .flatten()
                .map(|m| m.weight())
                .fold(0.0, f64::max);
        }
        stats.rounds = stats.rounds.saturating_add(ps.rounds);
        stats.executed_steps += ps.executed_steps;
        stats.work += ps.work;
        stats.phases.push(ps);

        if i < sched.ell {
            part = ClusterPartition::new(n, i + 1, next)?;
        }
    }

    Ok((
        HopsetLayer {
            family: None,
            scale: k,
            prev: prev.map(|p| p.1),
            edges: edges.into_values().collect(),
            stats,
        },
        audit,
    ))
}

/// Builds every scale `k_0 ..= λ`.
pub fn build_hopset(g: &Graph, params: HopsetParams) -> Result<Hopset> {
    build_hopset_with(g, params, &BuildOptions::default()).map(|r| r.0)
}

pub fn build_hopset_with(
    g: &Graph,
    params: HopsetParams,
    opts: &BuildOptions,
) -> Result<(Hopset, Vec<ScaleAudit>)> {
    let lambda_ratio = match params.aspect_ratio {
        Some(x) => x,
        None if g.m() == 0 => 1.0,
        None => aspect_ratio(g)?,
    };
    let mut sched = compute_schedule(
        g.n(),
        params.epsilon,
        params.kappa,
        params.rho,
        lambda_ratio,
        params.mode,
    )?;
    sched.unit = g.min_weight().unwrap_or(1.0);
    let mut layers: Vec<HopsetLayer> = Vec::new();
    let mut audits = Vec::new();
    for k in sched.scales() {
        let prev = layers.last().map(|l| (l, layers.len() - 1));
        let (layer, audit) = build_single_scale(g, prev, k, &sched, opts)?;
        layers.push(layer);
        audits.push(audit);
    }
    Ok((
        Hopset {
            format_version: FORMAT_VERSION,
            n: g.n(),
            graph_checksum: g.checksum(),
            mode: HopsetMode::Direct,
            params: HopsetParams {
                aspect_ratio: Some(lambda_ratio),
                ..params
            },
            hopbound: sched.beta,
            stretch_bound: sched.stretch_bound(),
            schedule: Some(sched),
            layers,
            reduced: None,
            memory: opts.memory,
        },
        audits,
    ))
}
