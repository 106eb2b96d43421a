//! Weight reduction.
//!
//! For every relevant scale `k` the graph is contracted along edges lighter
//! than `τ_k = (ε/n)·2^k` into nodes, and nodes are joined by superedges
//! built from the lightest crossing edge of weight at most `2^{k+1}`. Each
//! contracted graph has aspect ratio `O(n/ε)`, so a hopset for it costs no
//! `log Λ` factor. Node centers are chosen bottom-up so that every vertex
//! changes center at most `log n` times, and a star edge joins every center
//! to every member of its nodes.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builder::{build_hopset_with, BuildOptions, Hopset, HopsetMode, HopsetParams, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::memory::MemoryPath;
use crate::overlay::Link;
use crate::schedule::ParameterSchedule;

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        // smaller root wins so labels stay canonical
        let (lo, hi) = (a.min(b), a.max(b));
        self.parent[hi] = lo;
        true
    }
}

/// Minimum spanning forest, edges taken in `(weight, index)` order. The
/// forest restricted to edges lighter than any threshold spans exactly the
/// components of the graph restricted to those edges, so the trees of all
/// scales are nested.
#[derive(Clone, Debug)]
pub struct SpanningForest {
    pub edges: Vec<usize>,
    /// `(neighbor, edge index)` per vertex.
    pub adj: Vec<Vec<(usize, usize)>>,
}

pub fn spanning_forest(g: &Graph) -> SpanningForest {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by(|&a, &b| g.edge(a).w.total_cmp(&g.edge(b).w).then(a.cmp(&b)));
    let mut dsu = Dsu::new(g.n());
    let mut edges = Vec::new();
    let mut adj = vec![Vec::new(); g.n()];
    for e in order {
        let (u, v) = (g.edge(e).u, g.edge(e).v);
        if dsu.union(u, v) {
            edges.push(e);
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
    }
    for row in &mut adj {
        row.sort_unstable();
    }
    SpanningForest { edges, adj }
}

fn contraction_threshold(g: &Graph, eps: f64, k: i64) -> f64 {
    eps / g.n() as f64 * 2f64.powi(k as i32) * g.min_weight().unwrap_or(1.0)
}

fn scale_cap(g: &Graph, k: i64) -> f64 {
    2f64.powi((k + 1) as i32) * g.min_weight().unwrap_or(1.0)
}

/// Whether weight `w` lies in the window `(τ_k, 2^{k+1}]` of scale `k`.
pub fn in_window(g: &Graph, eps: f64, k: i64, w: f64) -> bool {
    contraction_threshold(g, eps, k) < w && w <= scale_cap(g, k)
}

/// Scales `k >= 0` whose window holds at least one edge weight.
pub fn relevant_scales(g: &Graph, eps: f64) -> Vec<i64> {
    let Some(unit) = g.min_weight() else {
        return Vec::new();
    };
    let mut ks = BTreeSet::new();
    for e in g.edges() {
        let x = e.w / unit;
        let mut k = ((x.log2().floor() as i64) - 2).max(0);
        while contraction_threshold(g, eps, k) < e.w {
            if in_window(g, eps, k, e.w) {
                ks.insert(k);
            }
            k += 1;
        }
    }
    ks.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperEdge {
    /// Node endpoints, `x < y`.
    pub x: usize,
    pub y: usize,
    pub weight: f64,
    /// Lightest crossing edge and its endpoints in `x` and `y`.
    pub witness: usize,
    pub wx: usize,
    pub wy: usize,
}

#[derive(Clone, Debug)]
pub struct ReducedScaleGraph {
    pub k: i64,
    pub tau: f64,
    pub cap: f64,
    /// Members of each node, sorted; nodes ordered by smallest member.
    pub nodes: Vec<Vec<usize>>,
    pub node_of: Vec<usize>,
    pub superedges: Vec<SuperEdge>,
    /// Graph on nodes whose edge `i` is `superedges[i]`.
    pub graph: Graph,
}

pub fn build_scale_graph(g: &Graph, forest: &SpanningForest, eps: f64, k: i64) -> Result<ReducedScaleGraph> {
    let n = g.n();
    let tau = contraction_threshold(g, eps, k);
    let cap = scale_cap(g, k);
    let mut dsu = Dsu::new(n);
    for &e in &forest.edges {
        let ed = g.edge(e);
        if ed.w < tau {
            dsu.union(ed.u, ed.v);
        }
    }
    // roots are the smallest members, so root order is node order
    let mut node_of = vec![usize::MAX; n];
    let mut nodes: Vec<Vec<usize>> = Vec::new();
    let mut root_node = vec![usize::MAX; n];
    for v in 0..n {
        let r = dsu.find(v);
        if root_node[r] == usize::MAX {
            root_node[r] = nodes.len();
            nodes.push(Vec::new());
        }
        node_of[v] = root_node[r];
        nodes[root_node[r]].push(v);
    }

    let mut best: BTreeMap<(usize, usize), (f64, usize, usize, usize)> = BTreeMap::new();
    for (idx, e) in g.edges().iter().enumerate() {
        let (a, b) = (node_of[e.u], node_of[e.v]);
        if a == b || e.w > cap {
            continue;
        }
        let (x, y) = (a.min(b), a.max(b));
        let cand = (e.w, e.u, e.v, idx);
        let slot = best.entry((x, y)).or_insert(cand);
        if (cand.0, cand.1, cand.2) < (slot.0, slot.1, slot.2) {
            *slot = cand;
        }
    }
    let superedges: Vec<SuperEdge> = best
        .into_iter()
        .map(|((x, y), (w, u, v, idx))| {
            let (wx, wy) = if node_of[u] == x { (u, v) } else { (v, u) };
            SuperEdge {
                x,
                y,
                weight: w + (nodes[x].len() + nodes[y].len()) as f64 * tau,
                witness: idx,
                wx,
                wy,
            }
        })
        .collect();
    let graph = Graph::new(nodes.len(), superedges.iter().map(|s| (s.x, s.y, s.weight)))?;
    if graph.m() != superedges.len()
        || graph
            .edges()
            .iter()
            .zip(&superedges)
            .any(|(e, s)| e.u != s.x || e.v != s.y)
    {
        return Err(Error::Internal("superedge order does not match the node graph".into()));
    }
    Ok(ReducedScaleGraph {
        k,
        tau,
        cap,
        nodes,
        node_of,
        superedges,
        graph,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarEdge {
    pub center: usize,
    pub member: usize,
    /// Length of the spanning-tree path between the two.
    pub weight: f64,
    /// Next vertex from `member` toward `center` on that path.
    pub toward: usize,
    /// Graph edge from `member` to `toward`.
    pub via: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CenterSelection {
    /// `centers[j][node]` for the `j`-th relevant scale.
    pub centers: Vec<Vec<usize>>,
    /// Sorted by `(center, member)`.
    pub stars: Vec<StarEdge>,
    pub distinct_nodes: usize,
    /// Pointer-jumping rounds over the node forest.
    pub jump_iterations: u32,
}

/// Centers and star edges for the scale graphs, given in increasing scale
/// order. A node inherits the center of its largest child (ties to the
/// smaller center); children of the lowest scale are single vertices.
pub fn select_centers(g: &Graph, forest: &SpanningForest, scales: &[ReducedScaleGraph]) -> Result<CenterSelection> {
    let n = g.n();
    let mut centers: Vec<Vec<usize>> = Vec::new();
    let mut stars: BTreeMap<(usize, usize), StarEdge> = BTreeMap::new();
    // previous level: node of each vertex, node sizes, node centers
    let mut prev_of: Vec<usize> = (0..n).collect();
    let mut prev_size: Vec<usize> = vec![1; n];
    let mut prev_center: Vec<usize> = (0..n).collect();

    // distinct nodes across levels, with a parent pointer to the next
    // strictly larger node
    let mut distinct: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut up: Vec<usize> = Vec::new();
    let mut prev_ids: Vec<usize> = (0..n)
        .map(|v| {
            let id = distinct.len();
            distinct.insert(vec![v], id);
            up.push(id);
            id
        })
        .collect();

    for sg in scales {
        // laminarity: every previous node lies inside one node
        let mut parent_of_prev: BTreeMap<usize, usize> = BTreeMap::new();
        for v in 0..n {
            let p = prev_of[v];
            match parent_of_prev.insert(p, sg.node_of[v]) {
                Some(old) if old != sg.node_of[v] => {
                    return Err(Error::Internal(format!(
                        "node family is not laminar at scale {}",
                        sg.k
                    )));
                }
                _ => {}
            }
        }
        let mut cs = Vec::with_capacity(sg.nodes.len());
        let mut ids = Vec::with_capacity(sg.nodes.len());
        for members in &sg.nodes {
            let mut children: Vec<usize> = members.iter().map(|&v| prev_of[v]).collect();
            children.sort_unstable();
            children.dedup();
            let best = *children
                .iter()
                .min_by_key(|&&c| (std::cmp::Reverse(prev_size[c]), prev_center[c]))
                .expect("node has members");
            let c = prev_center[best];
            cs.push(c);
            if children.len() > 1 {
                let tree = tree_walk(g, forest, c, sg.tau);
                for &z in members {
                    if prev_of[z] == best {
                        continue;
                    }
                    let (weight, toward, via) = tree.get(&z).copied().ok_or_else(|| {
                        Error::Internal(format!("member {z} not reached from center {c}"))
                    })?;
                    stars.entry((c, z)).or_insert(StarEdge {
                        center: c,
                        member: z,
                        weight,
                        toward,
                        via,
                    });
                }
            }
            let next = distinct.len();
            let id = *distinct.entry(members.clone()).or_insert(next);
            if id == up.len() {
                up.push(id);
            }
            for &ch in &children {
                let cid = prev_ids[ch];
                if cid != id {
                    up[cid] = id;
                }
            }
            ids.push(id);
        }
        prev_of = sg.node_of.clone();
        prev_size = sg.nodes.iter().map(|m| m.len()).collect();
        prev_center = cs.clone();
        prev_ids = ids;
        centers.push(cs);
    }

    let distinct_nodes = distinct.len();
    if distinct_nodes > 2 * n.max(1) - 1 {
        return Err(Error::Internal(format!(
            "{distinct_nodes} distinct nodes exceed 2n - 1"
        )));
    }
    // pointer jumping to the roots of the node forest
    let mut jump_iterations = 0;
    let mut q = up;
    while q.iter().any(|&p| q[p] != p) {
        q = q.iter().map(|&p| q[p]).collect();
        jump_iterations += 1;
        if jump_iterations > 64 {
            return Err(Error::Internal("node forest has a cycle".into()));
        }
    }

    Ok(CenterSelection {
        centers,
        stars: stars.into_values().collect(),
        distinct_nodes,
        jump_iterations,
    })
}

/// Distances from `root` in the forest restricted to edges lighter than
/// `tau`, with the next vertex and edge toward the root.
fn tree_walk(g: &Graph, forest: &SpanningForest, root: usize, tau: f64) -> BTreeMap<usize, (f64, usize, usize)> {
    let mut out = BTreeMap::new();
    let mut stack = vec![(root, 0.0)];
    let mut seen = BTreeSet::from([root]);
    while let Some((u, d)) = stack.pop() {
        for &(v, e) in &forest.adj[u] {
            let w = g.edge(e).w;
            if w < tau && seen.insert(v) {
                out.insert(v, (d + w, u, e));
                stack.push((v, d + w));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMeta {
    pub scale: i64,
    pub tau: f64,
    pub cap: f64,
    pub nodes: Vec<Vec<usize>>,
    pub centers: Vec<usize>,
    pub superedges: Vec<SuperEdge>,
    /// Indices of this family's layers in the hopset.
    pub layers: Vec<usize>,
    pub schedule: Option<ParameterSchedule>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedMeta {
    /// `ε` used for contraction and for the family hopsets.
    pub epsilon: f64,
    pub families: Vec<FamilyMeta>,
    pub stars: Vec<StarEdge>,
    pub distinct_nodes: usize,
    pub jump_iterations: u32,
}

fn remap_memory(m: &MemoryPath, centers: &[usize], family: usize, offset: usize) -> MemoryPath {
    MemoryPath {
        vertices: m.vertices.iter().map(|&x| centers[x]).collect(),
        hops: m
            .hops
            .iter()
            .map(|&(l, w)| {
                let l = match l {
                    Link::Edge(e) => Link::Super { family, edge: e },
                    Link::Hop { layer, edge } => Link::Hop {
                        layer: layer + offset,
                        edge,
                    },
                    other => other,
                };
                (l, w)
            })
            .collect(),
    }
}

/// Hopset without the `log Λ` dependence: one family of layers per
/// relevant scale, built over the contracted graph, plus the star edges.
/// `params.epsilon` is divided by 6 internally so that the reported
/// stretch refers to the given value.
pub fn build_reduced_hopset(g: &Graph, params: HopsetParams, opts: &BuildOptions) -> Result<Hopset> {
    if g.n() == 0 {
        return Err(Error::Config("graph has no vertices".into()));
    }
    let eps = params.epsilon / 6.0;
    let forest = spanning_forest(g);
    let ks = relevant_scales(g, eps);
    let scales: Vec<ReducedScaleGraph> = ks
        .par_iter()
        .map(|&k| build_scale_graph(g, &forest, eps, k))
        .collect::<Result<_>>()?;
    let sel = select_centers(g, &forest, &scales)?;

    let fparams = HopsetParams {
        epsilon: eps,
        aspect_ratio: None,
        ..params
    };
    let built: Vec<Option<Hopset>> = scales
        .par_iter()
        .map(|sg| {
            if sg.graph.m() == 0 {
                Ok(None)
            } else {
                build_hopset_with(&sg.graph, fparams, opts).map(|r| Some(r.0))
            }
        })
        .collect::<Result<_>>()?;

    let mut layers = Vec::new();
    let mut families = Vec::new();
    let mut beta = 1u64;
    let mut worst_stretch = 1.0f64;
    for (f, (sg, h)) in scales.iter().zip(built).enumerate() {
        let centers = &sel.centers[f];
        let offset = layers.len();
        let mut ids = Vec::new();
        let mut schedule = None;
        if let Some(h) = h {
            beta = beta.max(h.hopbound);
            worst_stretch = worst_stretch.max(h.stretch_bound);
            for mut layer in h.layers {
                layer.family = Some(f);
                layer.prev = layer.prev.map(|p| p + offset);
                for e in &mut layer.edges {
                    e.u = centers[e.u];
                    e.v = centers[e.v];
                    e.memory = e.memory.as_ref().map(|m| remap_memory(m, centers, f, offset));
                }
                ids.push(layers.len());
                layers.push(layer);
            }
            schedule = h.schedule;
        }
        families.push(FamilyMeta {
            scale: sg.k,
            tau: sg.tau,
            cap: sg.cap,
            nodes: sg.nodes.clone(),
            centers: centers.clone(),
            superedges: sg.superedges.clone(),
            layers: ids,
            schedule,
        });
    }

    Ok(Hopset {
        format_version: FORMAT_VERSION,
        n: g.n(),
        graph_checksum: g.checksum(),
        mode: HopsetMode::Reduced,
        params,
        schedule: None,
        layers,
        reduced: Some(ReducedMeta {
            epsilon: eps,
            families,
            stars: sel.stars,
            distinct_nodes: sel.distinct_nodes,
            jump_iterations: sel.jump_iterations,
        }),
        hopbound: beta.saturating_mul(6).saturating_add(5),
        stretch_bound: 1.0 + 6.0 * (worst_stretch - 1.0),
        memory: opts.memory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(ws: &[f64]) -> Graph {
        Graph::new(ws.len() + 1, ws.iter().enumerate().map(|(i, &w)| (i, i + 1, w))).unwrap()
    }

    #[test]
    fn scale_graph_example() {
        // a-b-c-d with weights 1, 10, 100; ε = 1/2, n = 4: k = 5 gives
        // threshold 4 and cap 64
        let g = path(&[1.0, 10.0, 100.0]);
        let f = spanning_forest(&g);
        let sg = build_scale_graph(&g, &f, 0.5, 5).unwrap();
        assert_eq!(sg.tau, 4.0);
        assert_eq!(sg.cap, 64.0);
        assert_eq!(sg.nodes, vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(sg.superedges.len(), 1);
        let s = &sg.superedges[0];
        assert_eq!((s.x, s.y, s.wx, s.wy), (0, 1, 1, 2));
        assert_eq!(s.weight, 22.0);
    }

    #[test]
    fn scale_graph_extremes() {
        let g = path(&[5.0, 6.0, 7.0]);
        let f = spanning_forest(&g);
        // cap 2.5 below every weight
        let sg = build_scale_graph(&g, &f, 0.5, -2).unwrap();
        assert_eq!(sg.nodes.len(), 4);
        assert!(sg.superedges.is_empty());
        // threshold above every weight
        let sg = build_scale_graph(&g, &f, 1.0, 10).unwrap();
        assert_eq!(sg.nodes.len(), 1);
        assert!(sg.superedges.is_empty());
    }

    #[test]
    fn relevant_scales_match_enumeration() {
        let g = Graph::new(4, [(0, 1, 10.0)]).unwrap();
        let eps = 0.5;
        let want: Vec<i64> = (0..80).filter(|&k| in_window(&g, eps, k, 10.0)).collect();
        assert_eq!(relevant_scales(&g, eps), want);
        assert!(!want.is_empty());
        assert!(relevant_scales(&Graph::new(3, []).unwrap(), eps).is_empty());

        // unit weights: every edge contributes the same window
        let g = path(&[1.0; 7]);
        let want: Vec<i64> = (0..80).filter(|&k| in_window(&g, eps, k, 1.0)).collect();
        assert_eq!(relevant_scales(&g, eps), want);
    }

    #[test]
    fn centers_follow_largest_child() {
        // {0,1,2} joins {3,4} at the higher scale
        let g = Graph::new(
            5,
            [(0, 1, 1.0), (1, 2, 1.0), (3, 4, 1.0), (2, 3, 3.0)],
        )
        .unwrap();
        let f = spanning_forest(&g);
        let eps = 1.0;
        // n = 5: τ_k = 2^k / 5; k = 3 contracts weight 1, k = 4 contracts 3
        let lo = build_scale_graph(&g, &f, eps, 3).unwrap();
        let hi = build_scale_graph(&g, &f, eps, 4).unwrap();
        assert_eq!(lo.nodes, vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(hi.nodes, vec![vec![0, 1, 2, 3, 4]]);
        let sel = select_centers(&g, &f, &[lo, hi]).unwrap();
        assert_eq!(sel.centers, vec![vec![0, 3], vec![0]]);
        let pairs: Vec<(usize, usize, f64)> = sel.stars.iter().map(|s| (s.center, s.member, s.weight)).collect();
        assert_eq!(
            pairs,
            vec![(0, 1, 1.0), (0, 2, 2.0), (0, 3, 5.0), (0, 4, 6.0), (3, 4, 1.0)]
        );
        let s = sel.stars.iter().find(|s| s.member == 4 && s.center == 0).unwrap();
        assert_eq!(s.toward, 3);
        assert!(sel.distinct_nodes <= 2 * 5 - 1);
    }

    #[test]
    fn base_node_center_is_smallest_member() {
        let g = Graph::new(10, [(3, 7, 1.0), (7, 9, 1.0), (0, 3, 100.0)]).unwrap();
        let f = spanning_forest(&g);
        let sg = build_scale_graph(&g, &f, 1.0, 5).unwrap();
        let sel = select_centers(&g, &f, &[sg.clone()]).unwrap();
        let node = sg.node_of[3];
        assert_eq!(sg.nodes[node], vec![3, 7, 9]);
        assert_eq!(sel.centers[0][node], 3);
        let pairs: Vec<(usize, usize)> = sel.stars.iter().map(|s| (s.center, s.member)).collect();
        assert_eq!(pairs, vec![(3, 7), (3, 9)]);
    }
}
