//! Distance backbone extraction and its structural guarantees.
//!
//! An edge is *triangular* when its direct distance already equals the
//! closure value for its endpoints; such edges survive the closure
//! unchanged and form the backbone. Every other edge is *semi-triangular*:
//! some indirect path is shorter, the closure shrinks the pair's distance,
//! and the edge is redundant for shortest paths. The per-edge distortion
//! `s = direct / closure` measures how strongly the inequality breaks.

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::LengthOperator;
use crate::closure::{ClosureError, ClosureResult, SearchSpace};
use crate::graph::{DistanceGraph, EdgeKey, GraphError, GraphFingerprint, NodeId};

/// Default relative tolerance when classifying `d == closure`. Closures of
/// float inputs carry a few ulps of fold noise; integer-weight inputs can
/// pass 0 for exact comparison.
pub const DEFAULT_CLASSIFICATION_TOL: f64 = 1e-10;

/// Relative tolerance for closure-equality verdicts (sufficiency checks).
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum BackboneError {
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("backbone belongs to a different graph (backbone {got:?}, graph {want:?})")]
    FingerprintMismatch {
        got: GraphFingerprint,
        want: GraphFingerprint,
    },
    #[error("graph has no edges; backbone measures are undefined")]
    NoEdges,
    #[error("backbones come from different parent graphs")]
    DifferentParents,
    #[error("negative classification tolerance {0}")]
    NegativeTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    Triangular,
    SemiTriangular,
}

/// A semi-triangular edge with its direct distance, closure value and
/// distortion ratio, recorded at extraction time.
#[derive(Debug, Clone, Copy)]
pub struct RemovedEdge {
    pub key: EdgeKey,
    pub direct: f64,
    pub closure: f64,
    /// `direct / closure`, `> 1` by construction; `+inf` when the closure
    /// value is zero but the direct distance is not.
    pub distortion: f64,
}

/// The triangular-edge subgraph of a distance graph under one operator.
#[derive(Debug, Clone)]
pub struct Backbone {
    operator_id: String,
    fingerprint: GraphFingerprint,
    kept: Vec<(EdgeKey, f64)>,
    removed: Vec<RemovedEdge>,
    infinite_distortions: usize,
}

/// Classifies every edge against its closure value: kept iff
/// `direct <= closure * (1 + tol)`.
pub fn extract_backbone(
    g: &DistanceGraph,
    c: &ClosureResult,
    tol: f64,
) -> Result<Backbone, BackboneError> {
    if tol < 0.0 {
        return Err(BackboneError::NegativeTolerance(tol));
    }
    c.check_graph(g)?;
    let closure_values = c.edge_values(g)?;
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    let mut infinite_distortions = 0usize;
    for ((key, direct), closure) in g.edges().zip(closure_values) {
        if direct <= closure * (1.0 + tol) {
            kept.push((key, direct));
        } else {
            let distortion = if closure == 0.0 {
                infinite_distortions += 1;
                f64::INFINITY
            } else {
                direct / closure
            };
            removed.push(RemovedEdge {
                key,
                direct,
                closure,
                distortion,
            });
        }
    }
    Ok(Backbone {
        operator_id: c.operator_id().to_string(),
        fingerprint: c.fingerprint(),
        kept,
        removed,
        infinite_distortions,
    })
}

impl Backbone {
    pub fn operator_id(&self) -> &str {
        &self.operator_id
    }

    pub fn fingerprint(&self) -> GraphFingerprint {
        self.fingerprint
    }

    /// Triangular edges with their (unchanged) weights, canonical order.
    pub fn kept_edges(&self) -> &[(EdgeKey, f64)] {
        &self.kept
    }

    pub fn removed_edges(&self) -> &[RemovedEdge] {
        &self.removed
    }

    pub fn edge_total(&self) -> usize {
        self.kept.len() + self.removed.len()
    }

    /// Count of removed edges whose closure value was zero (flagged as
    /// infinite distortion).
    pub fn infinite_distortions(&self) -> usize {
        self.infinite_distortions
    }

    /// Fraction of triangular edges, counting each undirected edge once.
    pub fn tau(&self) -> Result<f64, BackboneError> {
        let total = self.edge_total();
        if total == 0 {
            return Err(BackboneError::NoEdges);
        }
        Ok(self.kept.len() as f64 / total as f64)
    }

    /// Edge redundancy, exactly `1 - tau`.
    pub fn sigma(&self) -> Result<f64, BackboneError> {
        Ok(1.0 - self.tau()?)
    }

    pub fn edge_class(&self, key: EdgeKey) -> Option<EdgeClass> {
        if self.kept.binary_search_by(|(k, _)| k.cmp(&key)).is_ok() {
            return Some(EdgeClass::Triangular);
        }
        self.removed
            .binary_search_by(|r| r.key.cmp(&key))
            .ok()
            .map(|_| EdgeClass::SemiTriangular)
    }

    /// Distortion of any parent edge: 1 for kept edges, the stored ratio
    /// for removed ones.
    pub fn distortion(&self, key: EdgeKey) -> Option<f64> {
        match self.edge_class(key)? {
            EdgeClass::Triangular => Some(1.0),
            EdgeClass::SemiTriangular => self
                .removed
                .binary_search_by(|r| r.key.cmp(&key))
                .ok()
                .map(|ix| self.removed[ix].distortion),
        }
    }

    /// The backbone as a graph over the parent's node set.
    pub fn subgraph(&self, parent: &DistanceGraph) -> Result<DistanceGraph, BackboneError> {
        self.check_parent(parent)?;
        Ok(parent.keep_edges(self.kept.iter().map(|(k, _)| *k))?)
    }

    fn check_parent(&self, parent: &DistanceGraph) -> Result<(), BackboneError> {
        let want = parent.fingerprint();
        if self.fingerprint != want {
            return Err(BackboneError::FingerprintMismatch {
                got: self.fingerprint,
                want,
            });
        }
        Ok(())
    }
}

/// Fraction of triangular edges of `g` under the closure `c`, counting
/// each undirected edge once.
pub fn tau(g: &DistanceGraph, c: &ClosureResult) -> Result<f64, BackboneError> {
    extract_backbone(g, c, DEFAULT_CLASSIFICATION_TOL)?.tau()
}

/// Edge redundancy of `g` under the closure `c`; exactly `1 - tau`.
pub fn sigma(g: &DistanceGraph, c: &ClosureResult) -> Result<f64, BackboneError> {
    extract_backbone(g, c, DEFAULT_CLASSIFICATION_TOL)?.sigma()
}

/// Per-edge distortion straight from a closure, without extracting the
/// whole backbone: `direct / closure`, 1 for triangular edges.
pub fn distortion(
    g: &DistanceGraph,
    c: &ClosureResult,
    key: EdgeKey,
) -> Result<f64, BackboneError> {
    c.check_graph(g)?;
    let ix = g
        .edge_index(key)
        .ok_or(BackboneError::Graph(GraphError::UnknownEdge(key)))?;
    let closure = c.edge_values(g)?[ix];
    let direct = g
        .weight(key.endpoints().0, key.endpoints().1)
        .expect("edge exists");
    if closure == 0.0 {
        return Ok(if direct == 0.0 { 1.0 } else { f64::INFINITY });
    }
    Ok((direct / closure).max(1.0))
}

#[derive(Debug, Clone, Copy)]
pub struct Witness {
    pub a: NodeId,
    pub b: NodeId,
    pub original: f64,
    pub reduced: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SufficiencyVerdict {
    pub equivalent: bool,
    pub witness: Option<Witness>,
}

fn values_match(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    if a.is_infinite() || b.is_infinite() {
        return false;
    }
    (a - b).abs() <= EQUIVALENCE_TOL * a.abs().max(b.abs())
}

/// Recomputes the closure on the kept-edge subgraph and compares it
/// entrywise with the closure of the parent graph. Streams one source row
/// at a time, so it works on graphs far above the dense-matrix cap.
pub fn verify_sufficiency<O: LengthOperator + ?Sized>(
    g: &DistanceGraph,
    b: &Backbone,
    op: &O,
) -> Result<SufficiencyVerdict, BackboneError> {
    b.check_parent(g)?;
    let sub = b.subgraph(g)?;
    let n = g.node_count();
    let witness = (0..n as NodeId)
        .into_par_iter()
        .map_init(
            || (SearchSpace::new(n), SearchSpace::new(n)),
            |(full_space, reduced_space), source| {
                let full = full_space.run(g, op, source);
                let reduced = reduced_space.run(&sub, op, source);
                for t in 0..source as usize {
                    if !values_match(full[t], reduced[t]) {
                        return Some(Witness {
                            a: source,
                            b: t as NodeId,
                            original: full[t],
                            reduced: reduced[t],
                        });
                    }
                }
                None
            },
        )
        .flatten_iter()
        .min_by_key(|w| (w.a, w.b));
    Ok(SufficiencyVerdict {
        equivalent: witness.is_none(),
        witness,
    })
}

/// Connectivity and bridge containment of the backbone:
/// `(backbone connected, bridges of parent all kept)`.
pub fn verify_connectivity_and_bridges(
    g: &DistanceGraph,
    b: &Backbone,
) -> Result<(bool, bool), BackboneError> {
    b.check_parent(g)?;
    let sub = b.subgraph(g)?;
    let connected = sub.is_connected();
    let bridges_kept = g
        .find_bridges()
        .into_iter()
        .all(|key| b.edge_class(key) == Some(EdgeClass::Triangular));
    Ok((connected, bridges_kept))
}

/// Containment of kept-edge sets. The backbone under a pointwise-smaller
/// operator nests inside the backbone under a pointwise-larger one, e.g.
/// max-backbone inside sum-backbone inside product-backbone.
pub fn nesting_check(inner: &Backbone, outer: &Backbone) -> Result<bool, BackboneError> {
    if inner.fingerprint != outer.fingerprint {
        return Err(BackboneError::DifferentParents);
    }
    Ok(inner
        .kept
        .iter()
        .all(|(key, _)| outer.edge_class(*key) == Some(EdgeClass::Triangular)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operator;
    use crate::closure::{sp_closure_dijkstra, ClosureOptions};
    use crate::corpus::five_node_example;
    use crate::graph::DistanceGraph;

    fn example_backbone(op: Operator) -> (DistanceGraph, Backbone, crate::corpus::ExampleIds) {
        let (g, ids) = five_node_example();
        let c = sp_closure_dijkstra(&g, &op, &ClosureOptions::default()).unwrap();
        let b = extract_backbone(&g, &c, DEFAULT_CLASSIFICATION_TOL).unwrap();
        (g, b, ids)
    }

    #[test]
    fn metric_backbone_of_example() {
        let (_, b, ids) = example_backbone(Operator::Sum);
        let kept: Vec<EdgeKey> = b.kept_edges().iter().map(|(k, _)| *k).collect();
        let expect = |a, bb| EdgeKey::new(a, bb).unwrap();
        assert_eq!(kept.len(), 5);
        for key in [
            expect(ids.i, ids.j),
            expect(ids.i, ids.l),
            expect(ids.l, ids.k),
            expect(ids.j, ids.m),
            expect(ids.m, ids.k),
        ] {
            assert_eq!(b.edge_class(key), Some(EdgeClass::Triangular), "{key}");
        }
        for key in [expect(ids.i, ids.k), expect(ids.j, ids.k)] {
            assert_eq!(b.edge_class(key), Some(EdgeClass::SemiTriangular), "{key}");
        }
        assert_eq!(b.tau().unwrap(), 5.0 / 7.0);
        assert_eq!(b.sigma().unwrap(), 1.0 - 5.0 / 7.0);
    }

    #[test]
    fn ultrametric_backbone_of_example() {
        let (_, b, ids) = example_backbone(Operator::Max);
        let expect = |a, bb| EdgeKey::new(a, bb).unwrap();
        assert_eq!(b.kept_edges().len(), 4);
        for key in [
            expect(ids.i, ids.l),
            expect(ids.l, ids.k),
            expect(ids.j, ids.m),
            expect(ids.m, ids.k),
        ] {
            assert_eq!(b.edge_class(key), Some(EdgeClass::Triangular), "{key}");
        }
        for key in [
            expect(ids.i, ids.j),
            expect(ids.i, ids.k),
            expect(ids.j, ids.k),
        ] {
            assert_eq!(b.edge_class(key), Some(EdgeClass::SemiTriangular), "{key}");
        }
        assert_eq!(b.tau().unwrap(), 4.0 / 7.0);
    }

    #[test]
    fn distortion_values_of_example() {
        let (g, b, ids) = example_backbone(Operator::Sum);
        let jk = EdgeKey::new(ids.j, ids.k).unwrap();
        let ik = EdgeKey::new(ids.i, ids.k).unwrap();
        assert_eq!(b.distortion(jk), Some(4.5));
        assert_eq!(b.distortion(ik), Some(1.125));
        for (key, _) in b.kept_edges() {
            assert_eq!(b.distortion(*key), Some(1.0));
        }
        // free-function route agrees
        let c = sp_closure_dijkstra(&g, &Operator::Sum, &ClosureOptions::default()).unwrap();
        assert_eq!(distortion(&g, &c, jk).unwrap(), 4.5);
        assert_eq!(distortion(&g, &c, ik).unwrap(), 1.125);
    }

    #[test]
    fn zero_weight_graph_keeps_everything() {
        let (g, _) = five_node_example();
        let zero = g.map_weights(|_| 0.0).unwrap();
        for op in Operator::BUILTINS {
            let c = sp_closure_dijkstra(&zero, &op, &ClosureOptions::default()).unwrap();
            let b = extract_backbone(&zero, &c, 0.0).unwrap();
            assert_eq!(b.tau().unwrap(), 1.0, "{op}");
        }
    }

    #[test]
    fn sufficiency_on_example() {
        for op in [Operator::Sum, Operator::Max] {
            let (g, b, _) = example_backbone(op);
            let verdict = verify_sufficiency(&g, &b, &op).unwrap();
            assert!(verdict.equivalent, "{op}: {:?}", verdict.witness);
        }
    }

    #[test]
    fn ultrametric_backbone_insufficient_for_metric_closure() {
        let (g, b, _) = example_backbone(Operator::Max);
        let verdict = verify_sufficiency(&g, &b, &Operator::Sum).unwrap();
        assert!(!verdict.equivalent);
        assert!(verdict.witness.is_some());
    }

    #[test]
    fn connectivity_and_bridges_on_example() {
        let (g, b, _) = example_backbone(Operator::Sum);
        assert_eq!(verify_connectivity_and_bridges(&g, &b).unwrap(), (true, true));
    }

    #[test]
    fn path_graph_backbone_is_whole_graph() {
        let g = DistanceGraph::from_indexed_edges(4, &[(0, 1, 5.0), (1, 2, 2.0), (2, 3, 7.0)]);
        let c = sp_closure_dijkstra(&g, &Operator::Sum, &ClosureOptions::default()).unwrap();
        let b = extract_backbone(&g, &c, 0.0).unwrap();
        assert_eq!(b.tau().unwrap(), 1.0);
        assert_eq!(verify_connectivity_and_bridges(&g, &b).unwrap(), (true, true));
    }

    #[test]
    fn nesting_of_example_backbones() {
        let (_, bu, _) = example_backbone(Operator::Max);
        let (_, bm, _) = example_backbone(Operator::Sum);
        let (_, bx, _) = example_backbone(Operator::Product);
        assert!(nesting_check(&bu, &bm).unwrap());
        assert!(nesting_check(&bm, &bx).unwrap());
        assert!(nesting_check(&bu, &bu).unwrap());
    }

    #[test]
    fn nesting_rejects_different_parents() {
        let (_, b1, _) = example_backbone(Operator::Sum);
        let g2 = DistanceGraph::from_indexed_edges(2, &[(0, 1, 1.0)]);
        let c2 = sp_closure_dijkstra(&g2, &Operator::Sum, &ClosureOptions::default()).unwrap();
        let b2 = extract_backbone(&g2, &c2, 0.0).unwrap();
        assert!(matches!(
            nesting_check(&b1, &b2),
            Err(BackboneError::DifferentParents)
        ));
    }

    #[test]
    fn fingerprint_mismatch_detected() {
        let (g, _) = five_node_example();
        let other = DistanceGraph::from_indexed_edges(2, &[(0, 1, 1.0)]);
        let c = sp_closure_dijkstra(&other, &Operator::Sum, &ClosureOptions::default()).unwrap();
        assert!(matches!(
            extract_backbone(&g, &c, 0.0),
            Err(BackboneError::Closure(ClosureError::FingerprintMismatch { .. }))
        ));
    }

    #[test]
    fn free_tau_sigma_match_the_extraction() {
        let (g, _) = five_node_example();
        let c = sp_closure_dijkstra(&g, &Operator::Sum, &ClosureOptions::default()).unwrap();
        assert_eq!(tau(&g, &c).unwrap(), 5.0 / 7.0);
        assert_eq!(sigma(&g, &c).unwrap(), 1.0 - 5.0 / 7.0);
        let empty = DistanceGraph::from_indexed_edges(3, &[]);
        let ce = sp_closure_dijkstra(&empty, &Operator::Sum, &ClosureOptions::default()).unwrap();
        assert!(matches!(tau(&empty, &ce), Err(BackboneError::NoEdges)));
    }

    #[test]
    fn drastic_backbone_drops_edges_bypassed_by_zero_chains() {
        // a-b and b-c cost nothing, so the drastic length of a-b-c is 0 and
        // the direct a-c edge is redundant; d-a stays (no zero detour)
        let g = DistanceGraph::from_indexed_edges(
            4,
            &[(0, 1, 0.0), (1, 2, 0.0), (0, 2, 5.0), (3, 0, 2.0)],
        );
        let c = sp_closure_dijkstra(&g, &Operator::Drastic, &ClosureOptions::default()).unwrap();
        let b = extract_backbone(&g, &c, 0.0).unwrap();
        assert_eq!(b.edge_class(EdgeKey::new(0, 2).unwrap()), Some(EdgeClass::SemiTriangular));
        assert_eq!(b.edge_class(EdgeKey::new(0, 1).unwrap()), Some(EdgeClass::Triangular));
        assert_eq!(b.edge_class(EdgeKey::new(3, 0).unwrap()), Some(EdgeClass::Triangular));
        assert_eq!(b.removed_edges()[0].distortion, f64::INFINITY);
        assert_eq!(b.infinite_distortions(), 1);
    }

    #[test]
    fn equal_length_alternative_keeps_edge() {
        // two nodes joined directly at 2 and indirectly at 1 + 1: the direct
        // edge is exactly matched, not beaten, so it stays triangular
        let g = DistanceGraph::from_indexed_edges(3, &[(0, 1, 2.0), (0, 2, 1.0), (2, 1, 1.0)]);
        let c = sp_closure_dijkstra(&g, &Operator::Sum, &ClosureOptions::default()).unwrap();
        let b = extract_backbone(&g, &c, 0.0).unwrap();
        assert_eq!(b.tau().unwrap(), 1.0);
    }
}
