//! Tree extraction with hopbounds small enough that hopset edges actually
//! appear in the query trees and must be unfolded.

use hopset::builder::build_hopset;
use hopset::spt::{extract_spt, validate_tree};
use hopset::sssp::dijkstra;
use hopset::synth::{generate, Family, GenSpec};
use hopset::{build_reduced_hopset, BuildOptions, EpsilonMode, Graph, Hopset, HopsetParams};

fn graphs() -> Vec<Graph> {
    let mut out = Vec::new();
    for seed in 0..4 {
        for (fam, n) in [(Family::Er, 64), (Family::PowerPath, 64), (Family::Geometric, 100), (Family::PowerCycle, 128)] {
            out.push(generate(&GenSpec::new(fam, n, 1e6, seed)).unwrap());
        }
    }
    out
}

fn params() -> HopsetParams {
    HopsetParams::new(0.5, 2, 0.4, EpsilonMode::Internal)
}

fn check(g: &Graph, h: &Hopset) -> usize {
    let mut rewired = 0;
    for src in [0, g.n() / 2, g.n() - 1] {
        let r = extract_spt(g, h, src).unwrap();
        let rep = validate_tree(g, &r.tree).unwrap();
        assert_eq!(rep.edges, g.n() - 1);
        assert!(rep.max_inconsistency <= 1e-9);
        let exact = dijkstra(g, src);
        for v in 0..g.n() {
            assert!(r.tree.dist[v] >= exact.dist[v] * (1.0 - 1e-9));
            // the tree never does worse than the hop-limited estimate
            assert!(r.tree.dist[v] <= r.estimates[v] * (1.0 + 1e-9));
        }
        rewired += r.steps.iter().map(|s| s.adopted).sum::<usize>();
    }
    rewired
}

#[test]
fn direct_trees_with_a_short_hopbound() {
    let mut rewired = 0;
    for g in graphs() {
        let mut h = build_hopset(&g, params()).unwrap();
        h.hopbound = 6;
        rewired += check(&g, &h);
    }
    assert!(rewired > 0);
}

#[test]
fn reduced_trees_with_a_short_hopbound() {
    let mut rewired = 0;
    for g in graphs() {
        let mut h = build_reduced_hopset(&g, params(), &BuildOptions::default()).unwrap();
        h.hopbound = 6;
        rewired += check(&g, &h);
    }
    assert!(rewired > 0);
}

#[test]
fn trees_with_the_real_hopbound_keep_the_stretch() {
    for g in graphs().into_iter().step_by(3) {
        for h in [
            build_hopset(&g, params()).unwrap(),
            build_reduced_hopset(&g, params(), &BuildOptions::default()).unwrap(),
        ] {
            let r = extract_spt(&g, &h, 1).unwrap();
            validate_tree(&g, &r.tree).unwrap();
            let exact = dijkstra(&g, 1);
            for v in 0..g.n() {
                assert!(r.tree.dist[v] <= h.stretch_bound * exact.dist[v] * (1.0 + 1e-9));
            }
        }
    }
}

#[test]
fn tree_without_memory_is_refused() {
    let g = generate(&GenSpec::new(Family::Er, 40, 1e6, 1)).unwrap();
    let opts = BuildOptions {
        memory: false,
        ..BuildOptions::default()
    };
    let (h, _) = hopset::builder::build_hopset_with(&g, params(), &opts).unwrap();
    assert!(h.edge_count() > 0);
    assert!(extract_spt(&g, &h, 0).is_err());
}
