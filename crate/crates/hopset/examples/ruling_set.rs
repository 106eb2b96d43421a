//! Deterministic (3, 2 log n)-ruling sets on an explicit graph.
//!
//!     cargo run --example ruling_set

use hopset::graph::log2_padded;
use hopset::ruling::{ruling_set, verify_ruling, VirtualGraph};

fn main() {
    // a 6 x 6 grid
    let side = 6;
    let ids: Vec<usize> = (0..side * side).collect();
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            let v = r * side + c;
            if c + 1 < side {
                edges.push((v, v + 1));
            }
            if r + 1 < side {
                edges.push((v, v + side));
            }
        }
    }
    let mut vg = VirtualGraph::new(&ids, &edges);
    let bits = log2_padded(ids.len());
    let out = ruling_set(&ids, bits, &mut vg);
    println!("ruling set {:?}", out.set);
    println!("{} levels, {} knock-out explorations", out.levels.len() - 1, out.explorations);
    match verify_ruling(&out.set, &ids, &vg, bits) {
        Ok(r) => println!("min separation {:?}, max cover {}", r.min_separation, r.max_cover),
        Err(e) => println!("violation: {e}"),
    }
}
