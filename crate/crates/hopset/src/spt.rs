//! Turning query trees over `G ∪ H` into trees over `G`.
//!
//! A `β`-hop Bellman-Ford tree may use hopset edges. Each of them is
//! replaced by its memory path, highest layer first: vertices on the path
//! adopt the path as their new route when it strictly improves their
//! estimate, and the child endpoint of the replaced edge always does. In
//! reduced hopsets, family layers are peeled independently and merged,
//! superedges are expanded into star-edge-star paths, and star edges are
//! replaced by spanning-tree paths. Pointer jumping finally computes exact
//! tree distances.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builder::{Hopset, HopsetMode};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::memory::MemoryPath;
use crate::overlay::Link;
use crate::query::HopsetIndex;
use crate::sssp::DistanceVector;

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    /// Distance estimate; exact tree distance once extraction finishes.
    pub dist: Vec<f64>,
    pub link: Vec<Option<Link>>,
}

impl PathTree {
    /// Tree of a single-source query, with the link the overlay used for
    /// every parent edge.
    pub fn from_query(index: &HopsetIndex, dv: &DistanceVector) -> Result<Self> {
        if dv.sources.len() != 1 {
            return Err(Error::Config("a path tree needs exactly one source".into()));
        }
        let n = dv.dist.len();
        let mut link = vec![None; n];
        for v in 0..n {
            if let Some(p) = dv.parent[v] {
                link[v] = Some(index.overlay().link(p, v).expect("parent edge exists").1);
            }
        }
        Ok(PathTree {
            root: dv.sources[0],
            parent: dv.parent.clone(),
            dist: dv.dist.clone(),
            link,
        })
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn edge_count(&self) -> usize {
        self.parent.iter().flatten().count()
    }

    fn count_links(&self, pred: impl Fn(&Link) -> bool) -> usize {
        self.link.iter().flatten().filter(|l| pred(l)).count()
    }

    /// Estimates strictly decrease toward the root, which rules out cycles.
    fn check_descending(&self) -> Result<()> {
        for v in 0..self.n() {
            if let Some(p) = self.parent[v] {
                if v == self.root || self.dist[p] >= self.dist[v] {
                    return Err(Error::Internal(format!(
                        "cycle risk at vertex {v}: parent {p} has estimate {} >= {}",
                        self.dist[p], self.dist[v]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One replacement step of the extraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepAudit {
    pub name: String,
    pub tree_edges: usize,
    /// Parent links that are not graph edges after the step.
    pub non_graph_links: usize,
    pub adopted: usize,
    /// Largest relative increase of any estimate (should be 0 up to
    /// rounding).
    pub max_increase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SptResult {
    pub tree: PathTree,
    /// Estimates before pointer jumping.
    pub estimates: Vec<f64>,
    pub steps: Vec<StepAudit>,
    pub jump_iterations: u32,
    /// Synchronous rounds: query rounds plus one per replacement step and
    /// pointer-jumping iteration.
    pub rounds: u64,
}

/// Walks given as `(child, path from its parent to the child)`. All
/// candidates are computed from the estimates before the step; path
/// interiors adopt a candidate only if it is strictly smaller, the child
/// always switches to its best candidate.
fn apply_paths(tree: &mut PathTree, paths: &[(usize, MemoryPath)]) -> Result<usize> {
    let mut forced = vec![false; tree.n()];
    let mut m: Vec<(usize, f64, usize, Link)> = Vec::new();
    for (v, path) in paths {
        let p = path.first();
        if path.last() != *v || tree.parent[*v] != Some(p) {
            return Err(Error::Internal(format!("replacement path does not end at vertex {v}")));
        }
        forced[*v] = true;
        let mut d = tree.dist[p];
        for (j, &(link, w)) in path.hops.iter().enumerate() {
            d += w;
            m.push((path.vertices[j + 1], d, path.vertices[j], link));
        }
    }
    m.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    m.dedup_by_key(|r| r.0);
    let mut adopted = 0;
    for (t, d, p, link) in m {
        if forced[t] || d < tree.dist[t] {
            tree.dist[t] = d;
            tree.parent[t] = Some(p);
            tree.link[t] = Some(link);
            adopted += 1;
        }
    }
    Ok(adopted)
}

fn oriented(path: &MemoryPath, from: usize, to: usize) -> Result<MemoryPath> {
    if path.first() == from && path.last() == to {
        Ok(path.clone())
    } else if path.first() == to && path.last() == from {
        Ok(path.reversed())
    } else {
        Err(Error::Internal(format!("memory path does not join {from} and {to}")))
    }
}

/// Replaces every parent edge that belongs to `layer` by its memory path.
pub fn peel_layer(tree: &mut PathTree, h: &Hopset, layer: usize) -> Result<usize> {
    let mut paths = Vec::new();
    for v in 0..tree.n() {
        if let Some(Link::Hop { layer: l, edge }) = tree.link[v] {
            if l != layer {
                continue;
            }
            let p = tree.parent[v].expect("linked vertex has a parent");
            let mem = h.layers[l].edges[edge].memory.as_ref().ok_or_else(|| {
                Error::Config("hopset was built without memory paths".into())
            })?;
            paths.push((v, oriented(mem, p, v)?));
        }
    }
    let adopted = apply_paths(tree, &paths)?;
    tree.check_descending()?;
    if tree.count_links(|l| matches!(l, Link::Hop { layer: x, .. } if *x == layer)) > 0 {
        return Err(Error::Internal(format!("layer {layer} survived its peeling")));
    }
    Ok(adopted)
}

/// Pointer jumping: `q(v)` starts at the parent and `d'(v)` at the parent
/// edge weight; each round sets `d'(v) += d'(q(v))` and `q(v) = q(q(v))`.
/// Returns exact root distances (infinite for vertices outside the tree)
/// and the number of rounds.
pub fn pointer_jump(parent: &[Option<usize>], weight: &[f64], root: usize) -> Result<(Vec<f64>, u32)> {
    let n = parent.len();
    // vertices without a parent point at themselves
    let mut q: Vec<usize> = (0..n).map(|v| parent[v].unwrap_or(v)).collect();
    let mut d: Vec<f64> = (0..n)
        .map(|v| if parent[v].is_some() { weight[v] } else { 0.0 })
        .collect();
    q[root] = root;
    d[root] = 0.0;
    let limit = usize::BITS - n.max(1).leading_zeros() + 1;
    let mut iters = 0;
    while (0..n).any(|v| q[q[v]] != q[v]) {
        if iters >= limit {
            return Err(Error::Internal("pointer jumping did not converge; parents form a cycle".into()));
        }
        let nd: Vec<f64> = (0..n).map(|v| d[v] + if q[v] == v { 0.0 } else { d[q[v]] }).collect();
        let nq: Vec<usize> = (0..n).map(|v| q[q[v]]).collect();
        d = nd;
        q = nq;
        iters += 1;
    }
    for v in 0..n {
        if q[v] != root {
            // an even cycle collapses onto itself instead of diverging
            if parent[q[v]].is_some() {
                return Err(Error::Internal(format!("vertex {v} lies on or below a parent cycle")));
            }
            d[v] = f64::INFINITY;
        }
    }
    Ok((d, iters))
}

fn star_index(h: &Hopset) -> BTreeMap<(usize, usize), usize> {
    h.reduced
        .as_ref()
        .map(|r| {
            r.stars
                .iter()
                .enumerate()
                .map(|(i, s)| ((s.center, s.member), i))
                .collect()
        })
        .unwrap_or_default()
}

/// Star edge walked from `from` to `to` (one of them the center).
fn star_hop(h: &Hopset, stars: &BTreeMap<(usize, usize), usize>, from: usize, to: usize) -> Result<(Link, f64)> {
    let r = h.reduced.as_ref().expect("reduced hopset");
    let i = stars
        .get(&(from, to))
        .or_else(|| stars.get(&(to, from)))
        .ok_or_else(|| Error::Internal(format!("no star edge between {from} and {to}")))?;
    Ok((Link::Star(*i), r.stars[*i].weight))
}

fn step_audit(name: &str, before: &[f64], tree: &PathTree, adopted: usize) -> Result<StepAudit> {
    let mut max_increase = 0.0f64;
    for (a, b) in before.iter().zip(&tree.dist) {
        if b > a {
            max_increase = max_increase.max((b - a) / a.abs().max(f64::MIN_POSITIVE));
        }
    }
    if max_increase > TOL {
        return Err(Error::Internal(format!("{name}: an estimate grew by {max_increase:e}")));
    }
    Ok(StepAudit {
        name: name.into(),
        tree_edges: tree.edge_count(),
        non_graph_links: tree.count_links(|l| !matches!(l, Link::Edge(_))),
        adopted,
        max_increase,
    })
}

/// Step 1 for reduced hopsets: every family peels its own layers on a copy
/// of the tree; each vertex then takes a graph, star or superedge link if
/// any copy offers one (smallest estimate, then smallest parent), and
/// otherwise keeps its entry.
fn peel_families(tree: &PathTree, h: &Hopset) -> Result<(PathTree, usize)> {
    let r = h.reduced.as_ref().expect("reduced hopset");
    let copies: Vec<(PathTree, usize)> = r
        .families
        .par_iter()
        .filter(|f| !f.layers.is_empty())
        .map(|f| {
            let mut t = tree.clone();
            let mut adopted = 0;
            for &l in f.layers.iter().rev() {
                adopted += peel_layer(&mut t, h, l)?;
            }
            Ok((t, adopted))
        })
        .collect::<Result<_>>()?;
    let mut out = tree.clone();
    let adopted = copies.iter().map(|c| c.1).sum();
    for v in 0..out.n() {
        let key = |t: &PathTree| {
            (
                t.link[v].is_some_and(|l| l.is_hop()),
                t.dist[v],
                t.parent[v],
            )
        };
        let better = |a: &(bool, f64, Option<usize>), b: &(bool, f64, Option<usize>)| {
            a.0 < b.0 || (a.0 == b.0 && (a.1 < b.1 || (a.1 == b.1 && a.2 < b.2)))
        };
        let mut best = key(&out);
        let mut from: Option<&PathTree> = None;
        for (c, _) in &copies {
            let k = key(c);
            if better(&k, &best) {
                best = k;
                from = Some(c);
            }
        }
        if let Some(c) = from {
            out.dist[v] = c.dist[v];
            out.parent[v] = c.parent[v];
            out.link[v] = c.link[v];
        }
    }
    out.check_descending()?;
    if out.count_links(|l| l.is_hop()) > 0 {
        return Err(Error::Internal("hopset links survived family peeling".into()));
    }
    Ok((out, adopted))
}

/// Step 2: a superedge between centers becomes center, star, crossing
/// edge, star, center.
fn expand_superedges(tree: &mut PathTree, g: &Graph, h: &Hopset, stars: &BTreeMap<(usize, usize), usize>) -> Result<usize> {
    let r = h.reduced.as_ref().expect("reduced hopset");
    let mut paths = Vec::new();
    for v in 0..tree.n() {
        let Some(Link::Super { family, edge }) = tree.link[v] else {
            continue;
        };
        let f = &r.families[family];
        let se = &f.superedges[edge];
        let p = tree.parent[v].expect("linked vertex has a parent");
        let (cx, cy) = (f.centers[se.x], f.centers[se.y]);
        let (a, b) = if (p, v) == (cx, cy) {
            (se.wx, se.wy)
        } else if (p, v) == (cy, cx) {
            (se.wy, se.wx)
        } else {
            return Err(Error::Internal(format!("superedge link at {v} does not join node centers")));
        };
        let mut path = MemoryPath::trivial(p);
        fn push(path: &mut MemoryPath, to: usize, hop: (Link, f64)) {
            path.vertices.push(to);
            path.hops.push(hop);
        }
        if a != p {
            push(&mut path, a, star_hop(h, stars, p, a)?);
        }
        push(&mut path, b, (Link::Edge(se.witness), g.edge(se.witness).w));
        if b != v {
            push(&mut path, v, star_hop(h, stars, b, v)?);
        }
        paths.push((v, path));
    }
    let adopted = apply_paths(tree, &paths)?;
    tree.check_descending()?;
    if tree.count_links(|l| matches!(l, Link::Super { .. })) > 0 {
        return Err(Error::Internal("superedge links survived expansion".into()));
    }
    Ok(adopted)
}

/// Step 3: star edges. A star edge from a center down to a member (type A)
/// is rewired to the member's spanning-tree neighbor toward the center,
/// after every star offers `d(center) + weight` to its member. A star edge
/// from a member up to a center (type B) is replaced by the spanning-tree
/// path from the member to the center, flipping the tree direction along
/// it.
fn replace_stars(tree: &mut PathTree, g: &Graph, h: &Hopset) -> Result<(usize, usize)> {
    let r = h.reduced.as_ref().expect("reduced hopset");
    let snap = tree.dist.clone();
    let mut m: Vec<(usize, f64, usize, usize)> = r
        .stars
        .iter()
        .map(|s| (s.member, snap[s.center] + s.weight, s.toward, s.via))
        .filter(|c| c.1.is_finite())
        .collect();
    m.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    m.dedup_by_key(|c| c.0);
    let mut adopted_a = 0;
    for (z, d, toward, via) in m {
        if d < tree.dist[z] {
            tree.dist[z] = d;
            tree.parent[z] = Some(toward);
            tree.link[z] = Some(Link::Edge(via));
            adopted_a += 1;
        }
    }
    for z in 0..tree.n() {
        let Some(Link::Star(i)) = tree.link[z] else {
            continue;
        };
        let s = &r.stars[i];
        if tree.parent[z] == Some(s.center) && s.member == z {
            tree.parent[z] = Some(s.toward);
            tree.link[z] = Some(Link::Edge(s.via));
            tree.dist[z] = tree.dist[s.toward] + g.edge(s.via).w;
            adopted_a += 1;
        }
    }
    tree.check_descending()?;

    let mut by_pair: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (i, s) in r.stars.iter().enumerate() {
        by_pair.insert((s.center, s.member), i);
    }
    let mut paths = Vec::new();
    for c in 0..tree.n() {
        let Some(Link::Star(i)) = tree.link[c] else {
            continue;
        };
        let s = &r.stars[i];
        if s.center != c || tree.parent[c] != Some(s.member) {
            return Err(Error::Internal(format!("star link at {c} matches neither orientation")));
        }
        let mut path = MemoryPath::trivial(s.member);
        let mut x = s.member;
        while x != c {
            let st = &r.stars[by_pair[&(c, x)]];
            path.vertices.push(st.toward);
            path.hops.push((Link::Edge(st.via), g.edge(st.via).w));
            x = st.toward;
        }
        paths.push((c, path));
    }
    let adopted_b = apply_paths(tree, &paths)?;
    tree.check_descending()?;
    if tree.count_links(|l| !matches!(l, Link::Edge(_))) > 0 {
        return Err(Error::Internal("non-graph links survived star replacement".into()));
    }
    Ok((adopted_a, adopted_b))
}

/// Approximate shortest-path tree from `source` over the edges of `g`.
pub fn extract_spt(g: &Graph, h: &Hopset, source: usize) -> Result<SptResult> {
    let index = HopsetIndex::new(g, h)?;
    let dv = index.sssd(&[source])?;
    let mut tree = PathTree::from_query(&index, &dv)?;
    tree.check_descending()?;
    let mut steps = Vec::new();
    match h.mode {
        HopsetMode::Direct => {
            for l in (0..h.layers.len()).rev() {
                let before = tree.dist.clone();
                let adopted = peel_layer(&mut tree, h, l)?;
                steps.push(step_audit(&format!("peel layer {l}"), &before, &tree, adopted)?);
            }
        }
        HopsetMode::Reduced => {
            let stars = star_index(h);
            let before = tree.dist.clone();
            let (t, adopted) = peel_families(&tree, h)?;
            tree = t;
            steps.push(step_audit("peel families", &before, &tree, adopted)?);
            let before = tree.dist.clone();
            let adopted = expand_superedges(&mut tree, g, h, &stars)?;
            steps.push(step_audit("expand superedges", &before, &tree, adopted)?);
            let before = tree.dist.clone();
            let (a, b) = replace_stars(&mut tree, g, h)?;
            steps.push(step_audit("replace stars", &before, &tree, a + b)?);
        }
    }
    let estimates = tree.dist.clone();
    let weight: Vec<f64> = (0..tree.n())
        .map(|v| match tree.link[v] {
            Some(Link::Edge(e)) => g.edge(e).w,
            _ => 0.0,
        })
        .collect();
    let (dist, jump_iterations) = pointer_jump(&tree.parent, &weight, tree.root)?;
    for v in 0..tree.n() {
        if dist[v] > estimates[v] * (1.0 + TOL) {
            return Err(Error::Internal(format!(
                "tree distance {} of vertex {v} exceeds its estimate {}",
                dist[v], estimates[v]
            )));
        }
    }
    tree.dist = dist;
    Ok(SptResult {
        tree,
        estimates,
        rounds: dv.rounds + steps.len() as u64 + jump_iterations as u64,
        steps,
        jump_iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeReport {
    pub edges: usize,
    pub reachable: usize,
    /// Largest `|d(v) - d(p(v)) - ω(p(v), v)|` relative to `d(v)`.
    pub max_inconsistency: f64,
    pub jump_iterations: u32,
}

/// Checks that a tree uses only graph edges, is acyclic and spans the
/// reachable vertices, and that its distances are parent-consistent.
pub fn validate_tree(g: &Graph, tree: &PathTree) -> Result<TreeReport> {
    let n = g.n();
    if tree.n() != n || tree.root >= n {
        return Err(Error::Config("tree does not match the graph".into()));
    }
    let mut weight = vec![0.0; n];
    for v in 0..n {
        if let Some(p) = tree.parent[v] {
            let e = match tree.link[v] {
                Some(Link::Edge(e)) if e < g.m() => g.edge(e),
                _ => return Err(Error::Internal(format!("vertex {v} hangs on a non-graph edge"))),
            };
            if !((e.u == p && e.v == v) || (e.v == p && e.u == v)) {
                return Err(Error::Internal(format!("edge of vertex {v} does not join its parent")));
            }
            weight[v] = e.w;
        }
    }
    let (dist, jump_iterations) = pointer_jump(&tree.parent, &weight, tree.root)?;
    let reachable = dist.iter().filter(|d| d.is_finite()).count();
    if tree.edge_count() + 1 != reachable {
        return Err(Error::Internal(format!(
            "{} edges for {reachable} reachable vertices",
            tree.edge_count()
        )));
    }
    let comp = g.components();
    if (0..n).any(|v| (comp[v] == comp[tree.root]) != dist[v].is_finite()) {
        return Err(Error::Internal("tree does not span the source component".into()));
    }
    let mut max_inconsistency = 0.0f64;
    for v in 0..n {
        if let Some(p) = tree.parent[v] {
            let gap = (tree.dist[v] - tree.dist[p] - weight[v]).abs() / tree.dist[v].max(f64::MIN_POSITIVE);
            max_inconsistency = max_inconsistency.max(gap);
        }
        if dist[v].is_finite() && (dist[v] - tree.dist[v]).abs() > TOL * dist[v].max(1.0) {
            return Err(Error::Internal(format!(
                "vertex {v}: stored distance {} but tree distance {}",
                tree.dist[v], dist[v]
            )));
        }
    }
    Ok(TreeReport {
        edges: tree.edge_count(),
        reachable,
        max_inconsistency,
        jump_iterations,
    })
}
