//! Independent oracle implementations for the integration suites. These
//! deliberately avoid the production code paths they are used to check:
//! closures by exhaustive simple-path enumeration, components by BFS,
//! bridges by removal-and-recount, spanning trees by Prim's algorithm.

use backbone_core::algebra::LengthOperator;
use backbone_core::graph::{DistanceGraph, EdgeKey, NodeId};

/// All-pairs closure by enumerating every simple path (exponential; for
/// tiny graphs only). Folds edge weights with the operator along the path
/// and keeps the minimum per pair.
pub fn exhaustive_closure<O: LengthOperator + ?Sized>(g: &DistanceGraph, op: &O) -> Vec<f64> {
    let n = g.node_count();
    assert!(n <= 12, "exhaustive enumeration is exponential");
    let mut best = vec![f64::INFINITY; n * n];
    for i in 0..n {
        best[i * n + i] = 0.0;
    }
    let mut visited = vec![false; n];
    for source in 0..n as NodeId {
        visited.fill(false);
        visited[source as usize] = true;
        dfs(g, op, source, source, 0.0, &mut visited, &mut best);
    }
    best
}

fn dfs<O: LengthOperator + ?Sized>(
    g: &DistanceGraph,
    op: &O,
    source: NodeId,
    node: NodeId,
    length: f64,
    visited: &mut Vec<bool>,
    best: &mut Vec<f64>,
) {
    let n = g.node_count();
    for (nb, w) in g.neighbors(node) {
        if visited[nb as usize] {
            continue;
        }
        let candidate = op.combine(length, w);
        let slot = source as usize * n + nb as usize;
        if candidate < best[slot] {
            best[slot] = candidate;
        }
        // prune only when the extension can no longer improve any pair:
        // infinite lengths absorb, so recursion below them is pointless
        if candidate.is_infinite() {
            continue;
        }
        visited[nb as usize] = true;
        dfs(g, op, source, nb, candidate, visited, best);
        visited[nb as usize] = false;
    }
}

/// Connected component of `start` by plain BFS over an edge list.
pub fn bfs_component(g: &DistanceGraph, start: NodeId) -> Vec<NodeId> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    let mut out = Vec::new();
    seen[start as usize] = true;
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        out.push(u);
        for (nb, _) in g.neighbors(u) {
            if !seen[nb as usize] {
                seen[nb as usize] = true;
                queue.push_back(nb);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Largest component by flood fill, smallest first id on ties.
pub fn largest_component_oracle(g: &DistanceGraph) -> Vec<NodeId> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut best: Vec<NodeId> = Vec::new();
    for start in 0..n as NodeId {
        if seen[start as usize] {
            continue;
        }
        let comp = bfs_component(g, start);
        for &u in &comp {
            seen[u as usize] = true;
        }
        if comp.len() > best.len() {
            best = comp;
        }
    }
    best
}

fn component_count(g: &DistanceGraph) -> usize {
    g.components().len()
}

/// Bridges by brute force: remove each edge in turn and recount components.
pub fn bridges_by_removal(g: &DistanceGraph) -> std::collections::BTreeSet<EdgeKey> {
    let baseline = component_count(g);
    g.edges()
        .filter(|(key, _)| {
            let without = g.remove_edges([*key]).expect("edge exists");
            component_count(&without) > baseline
        })
        .map(|(key, _)| key)
        .collect()
}

/// Total weight of a minimum spanning tree by Prim's algorithm.
pub fn prim_mst_weight(g: &DistanceGraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || best[v] < best[u]) {
                u = v;
            }
        }
        assert!(best[u].is_finite(), "graph must be connected");
        in_tree[u] = true;
        total += best[u];
        for (nb, w) in g.neighbors(u as NodeId) {
            if !in_tree[nb as usize] && w < best[nb as usize] {
                best[nb as usize] = w;
            }
        }
    }
    total
}

/// Relative closeness for floating comparisons in the suites.
pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    if a.is_infinite() || b.is_infinite() {
        return false;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}
