//! Baseline graph reductions and structural measures used to contrast
//! with backbone extraction: weight thresholding, minimum spanning tree,
//! closure-impact reports and the Watts-Strogatz clustering coefficient.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::LengthOperator;
use crate::closure::{sp_closure_dijkstra, ClosureError, ClosureOptions};
use crate::graph::{DistanceGraph, EdgeKey, GraphError, NodeId};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("minimum spanning tree needs a connected graph")]
    Disconnected,
    #[error("clustering coefficient of an empty graph is undefined")]
    EmptyGraph,
    #[error("reduced graph is not an edge-subgraph of the original (edge {0} differs)")]
    NotASubgraph(EdgeKey),
    #[error("graphs have different node counts ({original} vs {reduced})")]
    NodeSetMismatch { original: usize, reduced: usize },
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Keeps exactly the edges with `d < alpha` (strict).
pub fn threshold_reduce(g: &DistanceGraph, alpha: f64) -> DistanceGraph {
    let keys = g
        .edges()
        .filter(|&(_, d)| d < alpha)
        .map(|(key, _)| key)
        .collect::<Vec<_>>();
    g.keep_edges(keys).expect("keys come from the graph itself")
}

/// Kruskal minimum spanning tree with ties broken by canonical edge key,
/// so equal-weight inputs always yield the same tree.
pub fn minimum_spanning_tree(g: &DistanceGraph) -> Result<DistanceGraph, ReductionError> {
    if !g.is_connected() {
        return Err(ReductionError::Disconnected);
    }
    let mut edges: Vec<(EdgeKey, f64)> = g.edges().collect();
    edges.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));

    struct Dsu {
        parent: Vec<u32>,
    }
    impl Dsu {
        fn find(&mut self, mut x: u32) -> u32 {
            while self.parent[x as usize] != x {
                self.parent[x as usize] = self.parent[self.parent[x as usize] as usize];
                x = self.parent[x as usize];
            }
            x
        }
        fn union(&mut self, a: u32, b: u32) -> bool {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                return false;
            }
            self.parent[ra as usize] = rb;
            true
        }
    }

    let mut dsu = Dsu {
        parent: (0..g.node_count() as u32).collect(),
    };
    let mut kept = Vec::with_capacity(g.node_count().saturating_sub(1));
    for (key, _) in edges {
        let (u, v) = key.endpoints();
        if dsu.union(u, v) {
            kept.push(key);
        }
    }
    Ok(g.keep_edges(kept)?)
}

/// Closure impact of replacing `original` by an edge-subgraph `reduced`.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    pub operator: String,
    pub connected: bool,
    pub component_count: usize,
    pub edges_original: usize,
    pub edges_reduced: usize,
    pub edges_kept_fraction: f64,
    /// Mean closure value over pairs reachable in both graphs.
    pub mean_closure_original: f64,
    pub mean_closure_reduced: f64,
    pub mean_closure_delta: f64,
    /// Mutually reachable pairs whose closure value changed.
    pub changed_pairs: usize,
    /// Pairs reachable in the original but not in the reduction.
    pub disconnected_pairs: usize,
}

pub fn reduction_report<O: LengthOperator + ?Sized>(
    original: &DistanceGraph,
    reduced: &DistanceGraph,
    op: &O,
) -> Result<ReductionReport, ReductionError> {
    if original.node_count() != reduced.node_count() {
        return Err(ReductionError::NodeSetMismatch {
            original: original.node_count(),
            reduced: reduced.node_count(),
        });
    }
    for (key, d) in reduced.edges() {
        let (u, v) = key.endpoints();
        if original.weight(u, v) != Some(d) {
            return Err(ReductionError::NotASubgraph(key));
        }
    }
    let opts = ClosureOptions::default();
    let c_orig = sp_closure_dijkstra(original, op, &opts)?;
    let c_red = sp_closure_dijkstra(reduced, op, &opts)?;
    let (n, orig) = c_orig.matrix()?;
    let (_, red) = c_red.matrix()?;

    let mut sum_orig = 0.0;
    let mut sum_red = 0.0;
    let mut both = 0usize;
    let mut changed = 0usize;
    let mut lost = 0usize;
    for i in 0..n {
        for j in 0..i {
            let a = orig[i * n + j];
            let b = red[i * n + j];
            if a.is_finite() && b.is_finite() {
                both += 1;
                sum_orig += a;
                sum_red += b;
                let tol = 1e-9 * a.abs().max(b.abs());
                if (a - b).abs() > tol {
                    changed += 1;
                }
            } else if a.is_finite() && b.is_infinite() {
                lost += 1;
            }
        }
    }
    let mean_orig = if both > 0 { sum_orig / both as f64 } else { f64::NAN };
    let mean_red = if both > 0 { sum_red / both as f64 } else { f64::NAN };
    Ok(ReductionReport {
        operator: op.id(),
        connected: reduced.is_connected(),
        component_count: reduced.components().len(),
        edges_original: original.edge_count(),
        edges_reduced: reduced.edge_count(),
        edges_kept_fraction: if original.edge_count() > 0 {
            reduced.edge_count() as f64 / original.edge_count() as f64
        } else {
            1.0
        },
        mean_closure_original: mean_orig,
        mean_closure_reduced: mean_red,
        mean_closure_delta: mean_red - mean_orig,
        changed_pairs: changed,
        disconnected_pairs: lost,
    })
}

/// Watts-Strogatz average clustering coefficient, treating the graph as
/// unweighted. Nodes of degree < 2 contribute 0.
pub fn average_clustering_coefficient(g: &DistanceGraph) -> Result<f64, ReductionError> {
    let n = g.node_count();
    if n == 0 {
        return Err(ReductionError::EmptyGraph);
    }
    let total: f64 = (0..n as NodeId)
        .into_par_iter()
        .map(|u| {
            let k = g.degree(u);
            if k < 2 {
                return 0.0;
            }
            let nbs: Vec<NodeId> = g.neighbors(u).map(|(v, _)| v).collect();
            let mut links = 0usize;
            for (ix, &a) in nbs.iter().enumerate() {
                for &b in &nbs[ix + 1..] {
                    if g.weight(a, b).is_some() {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .sum();
    Ok(total / n as f64)
}
