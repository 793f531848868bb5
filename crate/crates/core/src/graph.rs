//! Symmetric weighted distance graphs.
//!
//! A [`DistanceGraph`] stores a simple undirected graph whose edge weights
//! are finite non-negative distances. An absent pair of nodes is read as
//! distance `+inf`, and the diagonal is implicitly zero; neither is ever
//! stored. Node labels from the input are remapped to dense integer ids.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::algebra;

/// Dense node identifier, contiguous in `[0, n)` within one graph.
pub type NodeId = u32;

/// Canonical key for an undirected edge: always `u > v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    u: NodeId,
    v: NodeId,
}

impl EdgeKey {
    /// Builds the canonical key for a node pair. Returns `None` for self-pairs.
    pub fn new(a: NodeId, b: NodeId) -> Option<Self> {
        if a == b {
            return None;
        }
        Some(EdgeKey {
            u: a.max(b),
            v: a.min(b),
        })
    }

    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("negative weight {weight} on edge {src:?} -- {dst:?}{}", fmt_line(*line))]
    NegativeWeight {
        src: String,
        dst: String,
        weight: f64,
        line: Option<usize>,
    },
    #[error("non-finite weight on edge {src:?} -- {dst:?}{}", fmt_line(*line))]
    NonFiniteWeight {
        src: String,
        dst: String,
        line: Option<usize>,
    },
    #[error("proximity weight {weight} > 1 on edge {src:?} -- {dst:?}{}", fmt_line(*line))]
    ProximityOutOfRange {
        src: String,
        dst: String,
        weight: f64,
        line: Option<usize>,
    },
    #[error("graph has {n} nodes; operation needs at least {min}")]
    TooFewNodes { n: usize, min: usize },
    #[error("edge {0} not present in graph")]
    UnknownEdge(EdgeKey),
    #[error("node id {0} out of range")]
    UnknownNode(NodeId),
    #[error("weight transform produced an invalid distance {0}")]
    InvalidTransformedWeight(f64),
}

fn fmt_line(line: Option<usize>) -> String {
    match line {
        Some(l) => format!(" (line {l})"),
        None => String::new(),
    }
}

/// One edge record as parsed from input, before any merging.
#[derive(Debug, Clone)]
pub struct RawEdge {
    pub source: String,
    pub target: String,
    pub weight: f64,
    /// 1-based input line, when the record came from a file.
    pub line: Option<usize>,
}

impl RawEdge {
    pub fn new(source: impl Into<String>, target: impl Into<String>, weight: f64) -> Self {
        RawEdge {
            source: source.into(),
            target: target.into(),
            weight,
            line: None,
        }
    }
}

/// How input weights are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightKind {
    /// Weights are distances in `[0, inf)`.
    #[default]
    Distance,
    /// Weights are proximities in `(0, 1]`; converted via `d = 1/p - 1`.
    /// A proximity of exactly 0 means "no edge" and is dropped.
    Proximity,
}

/// Merge rule for duplicate entries of the same undirected pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymmetrizeRule {
    /// Keep the smallest distance. Conservative under shortest-path semantics.
    #[default]
    Min,
    /// Average the distances of the duplicate entries.
    Mean,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    pub weight_kind: WeightKind,
    pub symmetrize: SymmetrizeRule,
}

/// Tallies of input anomalies resolved while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    /// Extra entries for an already-seen undirected pair.
    pub merged_duplicates: usize,
    /// Merged pairs whose duplicate entries disagreed on the weight.
    pub conflicting_duplicates: usize,
    pub self_loops_dropped: usize,
    pub zero_proximity_dropped: usize,
}

/// Fingerprint used to tie derived artifacts back to their source graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphFingerprint {
    pub nodes: usize,
    pub edges: usize,
    pub weight_hash: u64,
}

/// Immutable symmetric distance graph with CSR adjacency.
#[derive(Debug, Clone)]
pub struct DistanceGraph {
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    /// Canonical edges sorted by (u, v), u > v.
    edges: Vec<(EdgeKey, f64)>,
    csr_offsets: Vec<usize>,
    csr_neighbors: Vec<NodeId>,
    csr_weights: Vec<f64>,
}

/// Build a distance graph from raw records, applying weight conversion,
/// self-loop dropping and duplicate merging.
pub fn build_distance_graph(
    rows: &[RawEdge],
    opts: &BuildOptions,
) -> Result<(DistanceGraph, BuildStats), GraphError> {
    let mut stats = BuildStats::default();
    let mut labels: Vec<String> = Vec::new();
    let mut label_index: HashMap<String, NodeId> = HashMap::new();
    let mut intern = |label: &str, labels: &mut Vec<String>| -> NodeId {
        if let Some(&id) = label_index.get(label) {
            return id;
        }
        let id = labels.len() as NodeId;
        labels.push(label.to_string());
        label_index.insert(label.to_string(), id);
        id
    };

    struct Acc {
        min: f64,
        sum: f64,
        first: f64,
        count: usize,
    }
    let mut merged: HashMap<(NodeId, NodeId), Acc> = HashMap::new();
    for row in rows {
        if !row.weight.is_finite() {
            return Err(GraphError::NonFiniteWeight {
                src: row.source.clone(),
                dst: row.target.clone(),
                line: row.line,
            });
        }
        if row.weight < 0.0 {
            return Err(GraphError::NegativeWeight {
                src: row.source.clone(),
                dst: row.target.clone(),
                weight: row.weight,
                line: row.line,
            });
        }
        let distance = match opts.weight_kind {
            WeightKind::Distance => row.weight,
            WeightKind::Proximity => {
                if row.weight > 1.0 {
                    return Err(GraphError::ProximityOutOfRange {
                        src: row.source.clone(),
                        dst: row.target.clone(),
                        weight: row.weight,
                        line: row.line,
                    });
                }
                if row.weight == 0.0 {
                    stats.zero_proximity_dropped += 1;
                    // still intern both endpoints so the node set is stable
                    intern(&row.source, &mut labels);
                    intern(&row.target, &mut labels);
                    continue;
                }
                algebra::proximity_to_distance(row.weight).expect("validated proximity")
            }
        };
        let a = intern(&row.source, &mut labels);
        let b = intern(&row.target, &mut labels);
        let Some(key) = EdgeKey::new(a, b) else {
            stats.self_loops_dropped += 1;
            continue;
        };
        match merged.entry(key.endpoints()) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(Acc {
                    min: distance,
                    sum: distance,
                    first: distance,
                    count: 1,
                });
            }
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let acc = e.get_mut();
                stats.merged_duplicates += 1;
                if distance != acc.first {
                    stats.conflicting_duplicates += 1;
                }
                acc.min = acc.min.min(distance);
                acc.sum += distance;
                acc.count += 1;
            }
        }
    }

    let mut edges: Vec<(EdgeKey, f64)> = merged
        .into_iter()
        .map(|((u, v), acc)| {
            let d = match opts.symmetrize {
                SymmetrizeRule::Min => acc.min,
                SymmetrizeRule::Mean => acc.sum / acc.count as f64,
            };
            (EdgeKey { u, v }, d)
        })
        .collect();
    edges.sort_by(|a, b| a.0.cmp(&b.0));

    Ok((DistanceGraph::from_parts(labels, edges), stats))
}

impl DistanceGraph {
    /// Assembles a graph from interned labels and canonical edges.
    /// Edges must reference valid ids; duplicates are not checked here.
    fn from_parts(labels: Vec<String>, mut edges: Vec<(EdgeKey, f64)>) -> Self {
        edges.sort_by(|a, b| a.0.cmp(&b.0));
        let n = labels.len();
        let mut degree = vec![0usize; n];
        for (key, _) in &edges {
            degree[key.u as usize] += 1;
            degree[key.v as usize] += 1;
        }
        let mut csr_offsets = vec![0usize; n + 1];
        for i in 0..n {
            csr_offsets[i + 1] = csr_offsets[i] + degree[i];
        }
        let mut cursor = csr_offsets.clone();
        let mut csr_neighbors = vec![0 as NodeId; csr_offsets[n]];
        let mut csr_weights = vec![0.0f64; csr_offsets[n]];
        for (key, d) in &edges {
            for (from, to) in [(key.u, key.v), (key.v, key.u)] {
                let slot = cursor[from as usize];
                csr_neighbors[slot] = to;
                csr_weights[slot] = *d;
                cursor[from as usize] += 1;
            }
        }
        // sort each adjacency row by neighbor id for binary-search lookups
        for i in 0..n {
            let (lo, hi) = (csr_offsets[i], csr_offsets[i + 1]);
            let mut row: Vec<(NodeId, f64)> = csr_neighbors[lo..hi]
                .iter()
                .copied()
                .zip(csr_weights[lo..hi].iter().copied())
                .collect();
            row.sort_by_key(|&(nb, _)| nb);
            for (k, (nb, w)) in row.into_iter().enumerate() {
                csr_neighbors[lo + k] = nb;
                csr_weights[lo + k] = w;
            }
        }
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as NodeId))
            .collect();
        DistanceGraph {
            labels,
            label_index,
            edges,
            csr_offsets,
            csr_neighbors,
            csr_weights,
        }
    }

    /// Builds from already-resolved ids; intended for generated graphs.
    /// Panics on self-loops or duplicate pairs (programming errors).
    pub fn from_indexed_edges(n: usize, edges: &[(NodeId, NodeId, f64)]) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        let mut canon: Vec<(EdgeKey, f64)> = edges
            .iter()
            .map(|&(a, b, d)| {
                assert!((a as usize) < n && (b as usize) < n, "node id out of range");
                assert!(d.is_finite() && d >= 0.0, "invalid distance {d}");
                (EdgeKey::new(a, b).expect("self-loop in indexed edges"), d)
            })
            .collect();
        canon.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in canon.windows(2) {
            assert!(pair[0].0 != pair[1].0, "duplicate edge {}", pair[0].0);
        }
        DistanceGraph::from_parts(labels, canon)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, u: NodeId) -> &str {
        &self.labels[u as usize]
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.label_index.get(label).copied()
    }

    /// Canonical edge list sorted by key.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (EdgeKey, f64)> + '_ {
        self.edges.iter().copied()
    }

    /// Index of an edge in the canonical order.
    pub fn edge_index(&self, key: EdgeKey) -> Option<usize> {
        self.edges.binary_search_by(|(k, _)| k.cmp(&key)).ok()
    }

    /// Stored distance of the pair, or `None` when absent (read as +inf).
    pub fn weight(&self, a: NodeId, b: NodeId) -> Option<f64> {
        if a == b {
            return Some(0.0);
        }
        let (lo, hi) = (
            self.csr_offsets[a as usize],
            self.csr_offsets[a as usize + 1],
        );
        let row = &self.csr_neighbors[lo..hi];
        row.binary_search(&b).ok().map(|k| self.csr_weights[lo + k])
    }

    /// Distance with absent pairs mapped to +inf.
    pub fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        self.weight(a, b).unwrap_or(f64::INFINITY)
    }

    pub fn neighbors(&self, u: NodeId) -> impl ExactSizeIterator<Item = (NodeId, f64)> + '_ {
        let (lo, hi) = (
            self.csr_offsets[u as usize],
            self.csr_offsets[u as usize + 1],
        );
        self.csr_neighbors[lo..hi]
            .iter()
            .copied()
            .zip(self.csr_weights[lo..hi].iter().copied())
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.csr_offsets[u as usize + 1] - self.csr_offsets[u as usize]
    }

    /// Fraction of node pairs joined by an edge: `m / (n(n-1)/2)`.
    pub fn density(&self) -> Result<f64, GraphError> {
        let n = self.node_count();
        if n < 2 {
            return Err(GraphError::TooFewNodes { n, min: 2 });
        }
        let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
        Ok(self.edge_count() as f64 / pairs)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n <= 1 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0 as NodeId];
        seen[0] = true;
        let mut visited = 1usize;
        while let Some(u) = stack.pop() {
            for (nb, _) in self.neighbors(u) {
                if !seen[nb as usize] {
                    seen[nb as usize] = true;
                    visited += 1;
                    stack.push(nb);
                }
            }
        }
        visited == n
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n as NodeId {
            if seen[start as usize] {
                continue;
            }
            let mut comp = vec![start];
            seen[start as usize] = true;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for (nb, _) in self.neighbors(u) {
                    if !seen[nb as usize] {
                        seen[nb as usize] = true;
                        comp.push(nb);
                        stack.push(nb);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Extracts the largest connected component; ties go to the component
    /// containing the smallest node id. Returns the subgraph and the map
    /// from new ids to original ids.
    pub fn largest_connected_component(&self) -> (DistanceGraph, Vec<NodeId>) {
        let comps = self.components();
        let Some(best) = comps.iter().max_by_key(|c| {
            // max_by_key keeps the later element on ties, so order by
            // (size, Reverse(first id)) to prefer the smallest first id
            (c.len(), std::cmp::Reverse(c[0]))
        }) else {
            return (DistanceGraph::from_parts(Vec::new(), Vec::new()), Vec::new());
        };
        let node_map: Vec<NodeId> = best.clone();
        let mut remap: HashMap<NodeId, NodeId> = HashMap::new();
        for (new, &old) in node_map.iter().enumerate() {
            remap.insert(old, new as NodeId);
        }
        let labels = node_map
            .iter()
            .map(|&old| self.labels[old as usize].clone())
            .collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|(key, d)| {
                let (u, v) = key.endpoints();
                match (remap.get(&u), remap.get(&v)) {
                    (Some(&nu), Some(&nv)) => {
                        Some((EdgeKey::new(nu, nv).expect("distinct ids"), *d))
                    }
                    _ => None,
                }
            })
            .collect();
        (DistanceGraph::from_parts(labels, edges), node_map)
    }

    /// Edges whose removal increases the number of connected components.
    pub fn find_bridges(&self) -> std::collections::BTreeSet<EdgeKey> {
        let n = self.node_count();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![usize::MAX; n];
        let mut bridges = std::collections::BTreeSet::new();
        let mut timer = 0usize;
        // iterative low-link DFS; parent tracked per node to skip the tree edge
        let mut parent = vec![NodeId::MAX; n];
        for root in 0..n as NodeId {
            if disc[root as usize] != usize::MAX {
                continue;
            }
            let mut stack: Vec<(NodeId, usize)> = vec![(root, 0)];
            disc[root as usize] = timer;
            low[root as usize] = timer;
            timer += 1;
            while let Some(&mut (u, ref mut child_ix)) = stack.last_mut() {
                let row_lo = self.csr_offsets[u as usize];
                let row_hi = self.csr_offsets[u as usize + 1];
                if row_lo + *child_ix < row_hi {
                    let nb = self.csr_neighbors[row_lo + *child_ix];
                    *child_ix += 1;
                    if disc[nb as usize] == usize::MAX {
                        parent[nb as usize] = u;
                        disc[nb as usize] = timer;
                        low[nb as usize] = timer;
                        timer += 1;
                        stack.push((nb, 0));
                    } else if nb != parent[u as usize] {
                        low[u as usize] = low[u as usize].min(disc[nb as usize]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        low[p as usize] = low[p as usize].min(low[u as usize]);
                        if low[u as usize] > disc[p as usize] {
                            bridges.insert(EdgeKey::new(p, u).expect("tree edge"));
                        }
                    }
                }
            }
        }
        bridges
    }

    /// Copy of the graph without the given edges. Never mutates `self`.
    pub fn remove_edges(
        &self,
        keys: impl IntoIterator<Item = EdgeKey>,
    ) -> Result<DistanceGraph, GraphError> {
        let mut drop = std::collections::BTreeSet::new();
        for key in keys {
            if self.edge_index(key).is_none() {
                return Err(GraphError::UnknownEdge(key));
            }
            drop.insert(key);
        }
        let edges = self
            .edges
            .iter()
            .filter(|(k, _)| !drop.contains(k))
            .copied()
            .collect();
        Ok(DistanceGraph::from_parts(self.labels.clone(), edges))
    }

    /// Copy of the graph restricted to the given edges (same node set).
    pub fn keep_edges(
        &self,
        keys: impl IntoIterator<Item = EdgeKey>,
    ) -> Result<DistanceGraph, GraphError> {
        let mut kept = Vec::new();
        for key in keys {
            let Some(ix) = self.edge_index(key) else {
                return Err(GraphError::UnknownEdge(key));
            };
            kept.push(self.edges[ix]);
        }
        Ok(DistanceGraph::from_parts(self.labels.clone(), kept))
    }

    /// Copy with every distance passed through `f`. The transform must
    /// produce finite non-negative distances.
    pub fn map_weights(&self, f: impl Fn(f64) -> f64) -> Result<DistanceGraph, GraphError> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for (key, d) in &self.edges {
            let nd = f(*d);
            if !nd.is_finite() || nd < 0.0 {
                return Err(GraphError::InvalidTransformedWeight(nd));
            }
            edges.push((*key, nd));
        }
        Ok(DistanceGraph::from_parts(self.labels.clone(), edges))
    }

    pub fn fingerprint(&self) -> GraphFingerprint {
        let mut hash = 0xcbf29ce484222325u64; // FNV-1a
        let mut mix = |value: u64| {
            for byte in value.to_le_bytes() {
                hash ^= byte as u64;
                hash = hash.wrapping_mul(0x100000001b3);
            }
        };
        for (key, d) in &self.edges {
            mix(key.u as u64);
            mix(key.v as u64);
            mix(d.to_bits());
        }
        GraphFingerprint {
            nodes: self.node_count(),
            edges: self.edge_count(),
            weight_hash: hash,
        }
    }

    /// Proximity view of the graph under `p = 1/(d+1)`.
    pub fn to_proximity(&self) -> ProximityGraph {
        let edges = self
            .edges
            .iter()
            .map(|(key, d)| {
                (
                    *key,
                    algebra::distance_to_proximity(*d).expect("stored distances are valid"),
                )
            })
            .collect();
        ProximityGraph {
            labels: self.labels.clone(),
            edges,
        }
    }
}

/// Symmetric proximity graph with weights in `(0, 1]`. Mostly a conversion
/// partner for [`DistanceGraph`]; analysis runs on the distance side.
#[derive(Debug, Clone)]
pub struct ProximityGraph {
    labels: Vec<String>,
    edges: Vec<(EdgeKey, f64)>,
}

impl ProximityGraph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (EdgeKey, f64)> + '_ {
        self.edges.iter().copied()
    }

    pub fn to_distance_graph(&self) -> DistanceGraph {
        let edges = self
            .edges
            .iter()
            .map(|(key, p)| {
                (
                    *key,
                    algebra::proximity_to_distance(*p).expect("stored proximities are valid"),
                )
            })
            .collect();
        DistanceGraph::from_parts(self.labels.clone(), edges)
    }
}
