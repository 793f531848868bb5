//! Generalized shortest-path distance closures.
//!
//! For a distance graph and a [`LengthOperator`] `g`, the closure holds for
//! every node pair the minimum over simple paths of the `g`-fold of edge
//! distances. Two independent routes compute it: a per-source label-setting
//! search (production, parallel over sources) and iterated min-`g` matrix
//! squaring (dense oracle).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{check_operator_laws, LengthOperator};
use crate::graph::{DistanceGraph, GraphFingerprint, NodeId};

#[derive(Debug, Error)]
pub enum ClosureError {
    #[error("operator {operator} failed law check: {detail}")]
    OperatorRejected { operator: String, detail: String },
    #[error("graph has {n} nodes, above the dense-matrix cap of {cap}; use edge-only mode")]
    NodeCapExceeded { n: usize, cap: usize },
    #[error("operation requires a full-matrix closure, got edge-only")]
    EdgeOnlyUnsupported,
    #[error("closure fingerprint does not match graph (closure {got:?}, graph {want:?})")]
    FingerprintMismatch {
        got: GraphFingerprint,
        want: GraphFingerprint,
    },
    #[error("graph has no node pairs to close")]
    EmptyGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureMode {
    FullMatrix,
    EdgeOnly,
}

#[derive(Debug, Clone, Copy)]
pub struct ClosureOptions {
    pub mode: ClosureMode,
    /// Dense storage guard: `FullMatrix` refuses graphs above this many nodes.
    pub node_cap: usize,
    /// Run a quick law check and refuse operators that fail it.
    pub verify_operator: bool,
}

pub const DEFAULT_NODE_CAP: usize = 20_000;

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            mode: ClosureMode::FullMatrix,
            node_cap: DEFAULT_NODE_CAP,
            verify_operator: true,
        }
    }
}

impl ClosureOptions {
    pub fn edge_only() -> Self {
        ClosureOptions {
            mode: ClosureMode::EdgeOnly,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
enum ClosureData {
    /// Row-major `n x n`, symmetric, zero diagonal, `+inf` for unreachable.
    Full { n: usize, values: Vec<f64> },
    /// One value per canonical edge of the source graph, in edge order.
    EdgeOnly { values: Vec<f64> },
}

/// Closure values plus provenance (operator, source-graph fingerprint).
#[derive(Debug, Clone)]
pub struct ClosureResult {
    operator_id: String,
    fingerprint: GraphFingerprint,
    data: ClosureData,
}

impl ClosureResult {
    pub fn operator_id(&self) -> &str {
        &self.operator_id
    }

    pub fn fingerprint(&self) -> GraphFingerprint {
        self.fingerprint
    }

    pub fn mode(&self) -> ClosureMode {
        match self.data {
            ClosureData::Full { .. } => ClosureMode::FullMatrix,
            ClosureData::EdgeOnly { .. } => ClosureMode::EdgeOnly,
        }
    }

    /// Closure value for an arbitrary pair; full-matrix mode only.
    pub fn value(&self, a: NodeId, b: NodeId) -> Result<f64, ClosureError> {
        match &self.data {
            ClosureData::Full { n, values } => Ok(values[a as usize * n + b as usize]),
            ClosureData::EdgeOnly { .. } => Err(ClosureError::EdgeOnlyUnsupported),
        }
    }

    /// Per-edge closure values for the given graph (must be the source graph).
    pub fn edge_values(&self, g: &DistanceGraph) -> Result<Vec<f64>, ClosureError> {
        self.check_graph(g)?;
        match &self.data {
            ClosureData::EdgeOnly { values } => Ok(values.clone()),
            ClosureData::Full { n, values } => Ok(g
                .edges()
                .map(|(key, _)| {
                    let (u, v) = key.endpoints();
                    values[u as usize * n + v as usize]
                })
                .collect()),
        }
    }

    pub fn matrix(&self) -> Result<(usize, &[f64]), ClosureError> {
        match &self.data {
            ClosureData::Full { n, values } => Ok((*n, values)),
            ClosureData::EdgeOnly { .. } => Err(ClosureError::EdgeOnlyUnsupported),
        }
    }

    pub fn check_graph(&self, g: &DistanceGraph) -> Result<(), ClosureError> {
        let want = g.fingerprint();
        if self.fingerprint != want {
            return Err(ClosureError::FingerprintMismatch {
                got: self.fingerprint,
                want,
            });
        }
        Ok(())
    }

    pub(crate) fn from_matrix(
        operator_id: String,
        fingerprint: GraphFingerprint,
        n: usize,
        values: Vec<f64>,
    ) -> Self {
        ClosureResult {
            operator_id,
            fingerprint,
            data: ClosureData::Full { n, values },
        }
    }
}

struct HeapEntry {
    length: f64,
    node: NodeId,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // reversed so the std max-heap pops the smallest (length, node) first;
    // the node index keeps pop order deterministic under length ties
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .length
            .total_cmp(&self.length)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Reusable per-worker state for repeated single-source runs.
pub(crate) struct SearchSpace {
    dist: Vec<f64>,
    heap: BinaryHeap<HeapEntry>,
}

impl SearchSpace {
    pub(crate) fn new(n: usize) -> Self {
        SearchSpace {
            dist: vec![f64::INFINITY; n],
            heap: BinaryHeap::new(),
        }
    }

    /// One single-source run; returns the distances row.
    pub(crate) fn run<O: LengthOperator + ?Sized>(
        &mut self,
        g: &DistanceGraph,
        op: &O,
        source: NodeId,
    ) -> &[f64] {
        single_source_with(g, op, source, &mut self.dist, &mut self.heap);
        &self.dist
    }
}

/// Single-source generalized shortest path lengths, written into `dist`.
///
/// Label-setting is valid because every length operator satisfies
/// `g(a, b) >= max(a, b)`, so settled labels can never improve.
fn single_source_with<O: LengthOperator + ?Sized>(
    g: &DistanceGraph,
    op: &O,
    source: NodeId,
    dist: &mut [f64],
    heap: &mut BinaryHeap<HeapEntry>,
) {
    dist.fill(f64::INFINITY);
    dist[source as usize] = 0.0;
    heap.clear();
    heap.push(HeapEntry {
        length: 0.0,
        node: source,
    });
    while let Some(HeapEntry { length, node }) = heap.pop() {
        if length > dist[node as usize] {
            continue;
        }
        for (nb, w) in g.neighbors(node) {
            // fold in discovery order along the path for reproducibility
            let candidate = op.combine(length, w);
            if candidate < dist[nb as usize] {
                dist[nb as usize] = candidate;
                heap.push(HeapEntry {
                    length: candidate,
                    node: nb,
                });
            }
        }
    }
}


/// Generalized-Dijkstra closure, parallel over sources.
pub fn sp_closure_dijkstra<O: LengthOperator + ?Sized>(
    g: &DistanceGraph,
    op: &O,
    opts: &ClosureOptions,
) -> Result<ClosureResult, ClosureError> {
    if opts.verify_operator {
        let report = check_operator_laws(op, 512, 0x1a17);
        if !report.passed() {
            let v = &report.violations[0];
            return Err(ClosureError::OperatorRejected {
                operator: op.id(),
                detail: format!(
                    "{:?} violated on inputs {:?}: {} vs {}",
                    v.law, v.inputs, v.lhs, v.rhs
                ),
            });
        }
    }
    let n = g.node_count();
    match opts.mode {
        ClosureMode::FullMatrix => {
            if n > opts.node_cap {
                return Err(ClosureError::NodeCapExceeded {
                    n,
                    cap: opts.node_cap,
                });
            }
            let mut values = vec![f64::INFINITY; n * n];
            values
                .par_chunks_mut(n.max(1))
                .enumerate()
                .for_each_init(BinaryHeap::new, |heap, (source, row)| {
                    single_source_with(g, op, source as NodeId, row, heap);
                });
            // opposite-direction folds can differ by an ulp for operators
            // whose evaluation is not exact; pin the matrix symmetric
            for i in 0..n {
                for j in 0..i {
                    let m = values[i * n + j].min(values[j * n + i]);
                    values[i * n + j] = m;
                    values[j * n + i] = m;
                }
            }
            Ok(ClosureResult {
                operator_id: op.id(),
                fingerprint: g.fingerprint(),
                data: ClosureData::Full { n, values },
            })
        }
        ClosureMode::EdgeOnly => {
            // canonical edges are sorted by (u, v); group them by their
            // larger endpoint u and run one source per group
            let edges: Vec<_> = g.edges().collect();
            let mut groups: Vec<(NodeId, usize, usize)> = Vec::new();
            for (ix, (key, _)) in edges.iter().enumerate() {
                let (u, _) = key.endpoints();
                match groups.last_mut() {
                    Some((gu, _, end)) if *gu == u => *end = ix + 1,
                    _ => groups.push((u, ix, ix + 1)),
                }
            }
            let chunks: Vec<(usize, Vec<f64>)> = groups
                .par_iter()
                .map_init(
                    || SearchSpace::new(n),
                    |space, &(u, start, end)| {
                        let dist = space.run(g, op, u);
                        let vals = edges[start..end]
                            .iter()
                            .map(|(key, _)| dist[key.endpoints().1 as usize])
                            .collect();
                        (start, vals)
                    },
                )
                .collect();
            let mut values = vec![f64::INFINITY; edges.len()];
            for (start, vals) in chunks {
                values[start..start + vals.len()].copy_from_slice(&vals);
            }
            Ok(ClosureResult {
                operator_id: op.id(),
                fingerprint: g.fingerprint(),
                data: ClosureData::EdgeOnly { values },
            })
        }
    }
}

/// Dense algebraic closure: repeated `C <- min(C, C o C)` with
/// `(C o C)_ij = min_k g(C_ik, C_kj)` until fixpoint. Quadratic memory;
/// intended as an independent oracle for moderate `n`.
pub fn sp_closure_algebraic<O: LengthOperator + ?Sized>(
    g: &DistanceGraph,
    op: &O,
) -> Result<ClosureResult, ClosureError> {
    let n = g.node_count();
    if n > 4096 {
        return Err(ClosureError::NodeCapExceeded { n, cap: 4096 });
    }
    let mut c = vec![f64::INFINITY; n * n];
    for i in 0..n {
        c[i * n + i] = 0.0;
    }
    for (key, d) in g.edges() {
        let (u, v) = key.endpoints();
        c[u as usize * n + v as usize] = d;
        c[v as usize * n + u as usize] = d;
    }
    // squaring converges within ceil(log2(n-1)) compositions
    let max_rounds = if n > 2 {
        (n as f64 - 1.0).log2().ceil() as usize + 1
    } else {
        1
    };
    let mut next = vec![0.0f64; n * n];
    for _ in 0..max_rounds {
        let mut changed = false;
        next.par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, row)| {
                for j in 0..n {
                    let mut best = c[i * n + j];
                    for k in 0..n {
                        let left = c[i * n + k];
                        if left.is_infinite() {
                            continue;
                        }
                        let cand = op.combine(left, c[k * n + j]);
                        if cand < best {
                            best = cand;
                        }
                    }
                    row[j] = best;
                }
            });
        for (a, b) in c.iter().zip(next.iter()) {
            if a != b {
                changed = true;
                break;
            }
        }
        std::mem::swap(&mut c, &mut next);
        if !changed {
            break;
        }
    }
    Ok(ClosureResult {
        operator_id: op.id(),
        fingerprint: g.fingerprint(),
        data: ClosureData::Full { n, values: c },
    })
}

/// Mean closure value over unordered pairs `i > j`, ignoring infinite
/// (unreachable) entries. Requires a full-matrix closure.
pub fn average_closure_length(c: &ClosureResult) -> Result<f64, ClosureError> {
    let (n, values) = c.matrix()?;
    if n < 2 {
        return Err(ClosureError::EmptyGraph);
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        for j in 0..i {
            let v = values[i * n + j];
            if v.is_finite() {
                sum += v;
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(ClosureError::EmptyGraph);
    }
    Ok(sum / count as f64)
}

/// Streaming mean of finite closure values over unordered pairs, without
/// materializing the matrix. One source run per node.
pub fn mean_closure_length_streaming<O: LengthOperator + ?Sized>(
    g: &DistanceGraph,
    op: &O,
) -> Result<f64, ClosureError> {
    let n = g.node_count();
    if n < 2 {
        return Err(ClosureError::EmptyGraph);
    }
    let (sum, count) = (0..n as NodeId)
        .into_par_iter()
        .map_init(
            || SearchSpace::new(n),
            |space, source| {
                let dist = space.run(g, op, source);
                let mut sum = 0.0;
                let mut count = 0usize;
                for v in dist.iter().take(source as usize) {
                    if v.is_finite() {
                        sum += v;
                        count += 1;
                    }
                }
                (sum, count)
            },
        )
        .reduce(|| (0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if count == 0 {
        return Err(ClosureError::EmptyGraph);
    }
    Ok(sum / count as f64)
}
