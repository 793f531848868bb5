//! Seeded graph generators for verification suites.
//!
//! The verify command and the property suites run over reproducible random
//! graphs; everything here is deterministic in the seed.

use crate::graph::{DistanceGraph, NodeId};
use crate::rng::SplitMix64;

/// Node ids of the bundled five-node worked example.
#[derive(Debug, Clone, Copy)]
pub struct ExampleIds {
    pub i: NodeId,
    pub j: NodeId,
    pub k: NodeId,
    pub l: NodeId,
    pub m: NodeId,
}

/// The five-node, seven-edge example graph used throughout the docs and
/// golden tests: a heavy triangle i-j-k with light detours i-l-k and j-m-k.
pub fn five_node_example() -> (DistanceGraph, ExampleIds) {
    let edges = [
        (0, 1, 9.0), // i - j
        (0, 2, 9.0), // i - k
        (1, 2, 9.0), // j - k
        (0, 3, 4.0), // i - l
        (3, 2, 4.0), // l - k
        (1, 4, 1.0), // j - m
        (4, 2, 1.0), // m - k
    ];
    let g = DistanceGraph::from_indexed_edges(5, &edges);
    (
        g,
        ExampleIds {
            i: 0,
            j: 1,
            k: 2,
            l: 3,
            m: 4,
        },
    )
}

/// Weight uniform over the dyadic grid `{1/64, 2/64, ..., 640/64}`, i.e.
/// `(0, 10]`. Grid weights make additive path lengths exact in f64, so
/// independent summation orders can be compared bit-for-bit.
pub fn grid_weight(rng: &mut SplitMix64) -> f64 {
    (rng.next_below(640) + 1) as f64 / 64.0
}

/// Random connected graph: a random spanning tree plus `extra_edges`
/// distinct random chords, dyadic-grid weights in `(0, 10]`.
pub fn random_connected_graph(n: usize, extra_edges: usize, seed: u64) -> DistanceGraph {
    assert!(n >= 1);
    let mut rng = SplitMix64::new(seed);
    let mut edges: Vec<(NodeId, NodeId, f64)> = Vec::new();
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.next_below(v);
        edges.push((u as NodeId, v as NodeId, grid_weight(&mut rng)));
        present.insert((u.min(v), u.max(v)));
    }
    let max_extra = n * (n - 1) / 2 - edges.len();
    let mut remaining = extra_edges.min(max_extra);
    let mut guard = 0;
    while remaining > 0 && guard < 100_000 {
        guard += 1;
        let a = rng.next_below(n);
        let b = rng.next_below(n);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if present.insert(key) {
            edges.push((a as NodeId, b as NodeId, grid_weight(&mut rng)));
            remaining -= 1;
        }
    }
    DistanceGraph::from_indexed_edges(n, &edges)
}

/// Random graph with independent edge probability `p`; may be disconnected.
pub fn random_graph(n: usize, p: f64, seed: u64) -> DistanceGraph {
    let mut rng = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.next_f64() < p {
                edges.push((a as NodeId, b as NodeId, grid_weight(&mut rng)));
            }
        }
    }
    DistanceGraph::from_indexed_edges(n, &edges)
}
