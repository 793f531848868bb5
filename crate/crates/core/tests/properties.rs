//! Property suites over seeded random graphs: invariants of the closure
//! (idempotence, symmetry, operator ordering, equivariances) and of the
//! backbone measures.

mod common;

use proptest::prelude::*;

use backbone_core::algebra::{derive_conjunction, Operator};
use backbone_core::backbone::{extract_backbone, DEFAULT_CLASSIFICATION_TOL};
use backbone_core::closure::{sp_closure_dijkstra, ClosureOptions};
use backbone_core::corpus::random_connected_graph;
use backbone_core::graph::{DistanceGraph, NodeId};

fn closure_matrix(g: &DistanceGraph, op: &Operator) -> Vec<f64> {
    let c = sp_closure_dijkstra(g, op, &ClosureOptions::default()).unwrap();
    let (_, values) = c.matrix().unwrap();
    values.to_vec()
}

fn graph_strategy() -> impl Strategy<Value = DistanceGraph> {
    (3usize..12, 0usize..12, any::<u64>())
        .prop_map(|(n, extra, seed)| random_connected_graph(n, extra, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_symmetric_with_zero_diagonal(g in graph_strategy()) {
        let n = g.node_count();
        for op in Operator::BUILTINS {
            let m = closure_matrix(&g, &op);
            for i in 0..n {
                prop_assert_eq!(m[i * n + i], 0.0);
                for j in 0..i {
                    prop_assert_eq!(m[i * n + j], m[j * n + i]);
                }
            }
        }
    }

    #[test]
    fn closure_is_idempotent(g in graph_strategy()) {
        let n = g.node_count();
        for op in [Operator::Sum, Operator::Max, Operator::Product] {
            let m = closure_matrix(&g, &op);
            // rebuild a graph whose edges are the closure values and close it again
            let mut edges = Vec::new();
            for i in 0..n {
                for j in 0..i {
                    if m[i * n + j].is_finite() {
                        edges.push((i as NodeId, j as NodeId, m[i * n + j]));
                    }
                }
            }
            let closed = DistanceGraph::from_indexed_edges(n, &edges);
            let again = closure_matrix(&closed, &op);
            for i in 0..n {
                for j in 0..n {
                    prop_assert!(
                        common::close_rel(m[i * n + j], again[i * n + j], 1e-9),
                        "{} at ({i},{j}): {} vs {}", op, m[i * n + j], again[i * n + j]
                    );
                }
            }
        }
    }

    #[test]
    fn pointwise_larger_operators_give_larger_closures(g in graph_strategy()) {
        let n = g.node_count();
        let m_max = closure_matrix(&g, &Operator::Max);
        let m_sum = closure_matrix(&g, &Operator::Sum);
        let m_prod = closure_matrix(&g, &Operator::Product);
        for i in 0..n * n {
            let slack = 1e-12 * m_sum[i].abs().max(1.0);
            prop_assert!(m_max[i] <= m_sum[i] + slack);
            let slack = 1e-12 * m_prod[i].abs().max(1.0);
            prop_assert!(m_sum[i] <= m_prod[i] + slack || m_prod[i].is_infinite());
        }
    }

    #[test]
    fn additive_closures_scale_with_the_weights(
        g in graph_strategy(),
        lambda in 0.1f64..10.0,
    ) {
        for op in [Operator::Sum, Operator::Minkowski(2.0)] {
            let base = closure_matrix(&g, &op);
            let scaled_graph = g.map_weights(|w| w * lambda).unwrap();
            let scaled = closure_matrix(&scaled_graph, &op);
            for (a, b) in base.iter().zip(scaled.iter()) {
                if a.is_infinite() {
                    prop_assert!(b.is_infinite());
                } else {
                    prop_assert!(common::close_rel(a * lambda, *b, 1e-9), "{} vs {}", a * lambda, b);
                }
            }
        }
    }

    #[test]
    fn minimax_closure_commutes_with_monotone_transforms(g in graph_strategy()) {
        // the minimax closure value is always one of the edge weights, so a
        // strictly increasing reweighting maps closures to closures exactly
        let transform = |w: f64| w * w + w;
        let base = closure_matrix(&g, &Operator::Max);
        let warped_graph = g.map_weights(transform).unwrap();
        let warped = closure_matrix(&warped_graph, &Operator::Max);
        for (a, b) in base.iter().zip(warped.iter()) {
            if a.is_infinite() {
                prop_assert!(b.is_infinite());
            } else if *a == 0.0 {
                prop_assert_eq!(*b, 0.0);
            } else {
                prop_assert_eq!(transform(*a), *b);
            }
        }
    }

    #[test]
    fn tau_sigma_are_dual(g in graph_strategy()) {
        for op in Operator::BUILTINS {
            let c = sp_closure_dijkstra(&g, &op, &ClosureOptions::edge_only()).unwrap();
            let b = extract_backbone(&g, &c, DEFAULT_CLASSIFICATION_TOL).unwrap();
            prop_assert_eq!(b.tau().unwrap() + b.sigma().unwrap(), 1.0);
            prop_assert!(b.tau().unwrap() >= 0.0 && b.tau().unwrap() <= 1.0);
        }
    }

    #[test]
    fn backbone_of_backbone_is_identity(g in graph_strategy()) {
        for op in [Operator::Sum, Operator::Max] {
            let c = sp_closure_dijkstra(&g, &op, &ClosureOptions::edge_only()).unwrap();
            let b = extract_backbone(&g, &c, DEFAULT_CLASSIFICATION_TOL).unwrap();
            let sub = b.subgraph(&g).unwrap();
            let c2 = sp_closure_dijkstra(&sub, &op, &ClosureOptions::edge_only()).unwrap();
            let b2 = extract_backbone(&sub, &c2, DEFAULT_CLASSIFICATION_TOL).unwrap();
            prop_assert_eq!(b2.removed_edges().len(), 0);
        }
    }

    #[test]
    fn removing_a_kept_edge_never_shortens_any_pair(g in graph_strategy()) {
        // semi-triangular removals leave the closure untouched (checked by
        // the sufficiency suite); kept-edge removals may only lengthen it
        for op in [Operator::Sum, Operator::Max] {
            let before = closure_matrix(&g, &op);
            let c = sp_closure_dijkstra(&g, &op, &ClosureOptions::edge_only()).unwrap();
            let b = extract_backbone(&g, &c, DEFAULT_CLASSIFICATION_TOL).unwrap();
            if let Some(&(key, direct)) = b.kept_edges().first() {
                let without = g.remove_edges([key]).unwrap();
                let after = closure_matrix(&without, &op);
                let n = g.node_count();
                for i in 0..n * n {
                    prop_assert!(
                        after[i] >= before[i] - 1e-12 * before[i].abs().max(1.0),
                        "{op}: pair {i} shrank from {} to {}", before[i], after[i]
                    );
                }
                // the removed pair itself can only be reached at >= the old
                // direct distance
                let (u, v) = key.endpoints();
                let slot = u as usize * n + v as usize;
                prop_assert!(after[slot] >= direct - 1e-12 * direct.max(1.0));
            }
        }
    }

    #[test]
    fn distortion_at_least_one_everywhere(g in graph_strategy()) {
        for op in Operator::BUILTINS {
            let c = sp_closure_dijkstra(&g, &op, &ClosureOptions::edge_only()).unwrap();
            let b = extract_backbone(&g, &c, DEFAULT_CLASSIFICATION_TOL).unwrap();
            for (key, _) in g.edges() {
                let s = b.distortion(key).unwrap();
                prop_assert!(s >= 1.0, "{op} {key}: {s}");
            }
        }
    }

    #[test]
    fn derived_conjunctions_stay_in_unit_interval(
        p1 in 0.0f64..=1.0,
        p2 in 0.0f64..=1.0,
    ) {
        for op in Operator::BUILTINS {
            let p = derive_conjunction(&op, p1, p2).unwrap();
            prop_assert!((0.0..=1.0).contains(&p), "{op}: {p}");
        }
    }

    #[test]
    fn isomorphism_round_trips_proximities(p in 0.001f64..=1.0) {
        let d = backbone_core::algebra::proximity_to_distance(p).unwrap();
        let back = backbone_core::algebra::distance_to_proximity(d).unwrap();
        prop_assert!(common::close_rel(p, back, 1e-12));
    }

    #[test]
    fn threshold_is_monotone_in_alpha(
        g in graph_strategy(),
        a1 in 0.0f64..12.0,
        a2 in 0.0f64..12.0,
    ) {
        use backbone_core::reductions::threshold_reduce;
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let g_lo = threshold_reduce(&g, lo);
        let g_hi = threshold_reduce(&g, hi);
        prop_assert!(g_lo.edge_count() <= g_hi.edge_count());
        for (key, d) in g_lo.edges() {
            let (u, v) = key.endpoints();
            prop_assert_eq!(g_hi.weight(u, v), Some(d));
        }
    }
}
