//! Executable property suite: the structural guarantees of backbones
//! (sufficiency, connectivity, bridge containment, nesting), the operator
//! laws, and the invariance properties, run against arbitrary graphs and
//! seeded random corpora. Shared by the `verify` command and the test
//! suites.

use serde::Serialize;

use crate::algebra::{
    check_operator_laws, dominance_check, DominanceVerdict, LengthOperator, Operator,
};
use crate::backbone::{extract_backbone, nesting_check, verify_connectivity_and_bridges,
    verify_sufficiency, Backbone, BackboneError, DEFAULT_CLASSIFICATION_TOL};
use crate::closure::{sp_closure_dijkstra, ClosureOptions};
use crate::corpus::random_connected_graph;
use crate::graph::DistanceGraph;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub subject: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn record(out: &mut Vec<CheckRecord>, check: &str, subject: &str, passed: bool, detail: String) {
    out.push(CheckRecord {
        check: check.to_string(),
        subject: subject.to_string(),
        passed,
        detail,
    });
}

fn backbone_for(
    g: &DistanceGraph,
    op: Operator,
) -> Result<Backbone, BackboneError> {
    let c = sp_closure_dijkstra(g, &op, &ClosureOptions::edge_only())?;
    extract_backbone(g, &c, DEFAULT_CLASSIFICATION_TOL)
}

/// Operator-level laws and the dominance chain; graph-independent.
pub fn check_operator_level(samples: usize, seed: u64, out: &mut Vec<CheckRecord>) {
    for op in Operator::BUILTINS {
        let report = check_operator_laws(&op, samples, seed);
        record(
            out,
            "operator-laws",
            &op.id(),
            report.passed(),
            if report.passed() {
                format!("{} samples", report.samples)
            } else {
                format!("{:?}", report.violations[0])
            },
        );
    }
    let chain = [
        (Operator::Max, Operator::Minkowski(2.0)),
        (Operator::Minkowski(2.0), Operator::Sum),
        (Operator::Sum, Operator::Product),
        (Operator::Product, Operator::Drastic),
    ];
    for (lo, hi) in chain {
        let verdict = dominance_check(&lo, &hi, samples, seed);
        record(
            out,
            "operator-dominance",
            &format!("{} <= {}", lo.id(), hi.id()),
            verdict == DominanceVerdict::Holds,
            format!("{verdict:?}"),
        );
    }
}

/// The backbone guarantees on one graph, for every built-in operator.
pub fn check_graph(g: &DistanceGraph, subject: &str, out: &mut Vec<CheckRecord>) {
    check_graph_with(g, subject, &Operator::BUILTINS, out);
}

/// The backbone guarantees on one graph, for the given operators. The
/// nesting and invariance checks run when their operators are present.
pub fn check_graph_with(
    g: &DistanceGraph,
    subject: &str,
    operators: &[Operator],
    out: &mut Vec<CheckRecord>,
) {
    let connected = g.is_connected();
    let mut backbones: Vec<(Operator, Backbone)> = Vec::new();
    for &op in operators {
        match backbone_for(g, op) {
            Ok(b) => backbones.push((op, b)),
            Err(e) => {
                record(out, "backbone-extraction", subject, false, format!("{op}: {e}"));
                return;
            }
        }
    }
    for (op, b) in &backbones {
        let subject_op = format!("{subject} [{op}]");
        match (b.tau(), b.sigma()) {
            (Ok(tau), Ok(sigma)) => record(
                out,
                "tau-sigma-duality",
                &subject_op,
                tau + sigma == 1.0,
                format!("tau={tau} sigma={sigma}"),
            ),
            _ => record(out, "tau-sigma-duality", &subject_op, false, "no edges".into()),
        }
        match verify_sufficiency(g, b, op) {
            Ok(v) => record(
                out,
                "backbone-sufficiency",
                &subject_op,
                v.equivalent,
                v.witness
                    .map(|w| format!("pair ({}, {}): {} vs {}", w.a, w.b, w.original, w.reduced))
                    .unwrap_or_else(|| "closure preserved".into()),
            ),
            Err(e) => record(out, "backbone-sufficiency", &subject_op, false, e.to_string()),
        }
        match verify_connectivity_and_bridges(g, b) {
            Ok((conn, bridges)) => {
                if connected {
                    record(
                        out,
                        "backbone-connectivity",
                        &subject_op,
                        conn,
                        format!("connected={conn}"),
                    );
                }
                record(
                    out,
                    "bridges-kept",
                    &subject_op,
                    bridges,
                    format!("bridges kept={bridges}"),
                );
            }
            Err(e) => record(out, "backbone-connectivity", &subject_op, false, e.to_string()),
        }
    }
    // nesting along the dominance chain: smaller operator, smaller backbone
    let by_op = |target: Operator| backbones.iter().find(|(op, _)| *op == target).map(|(_, b)| b);
    let chain = [
        (Operator::Max, Operator::Minkowski(2.0)),
        (Operator::Minkowski(2.0), Operator::Sum),
        (Operator::Sum, Operator::Product),
    ];
    for (lo, hi) in chain {
        if let (Some(inner), Some(outer)) = (by_op(lo), by_op(hi)) {
            match nesting_check(inner, outer) {
                Ok(ok) => record(
                    out,
                    "backbone-nesting",
                    &format!("{subject} [{} within {}]", lo.id(), hi.id()),
                    ok,
                    format!("{} <= {} edges", inner.kept_edges().len(), outer.kept_edges().len()),
                ),
                Err(e) => record(out, "backbone-nesting", subject, false, e.to_string()),
            }
        }
    }
    // invariances of the kept-edge sets
    if let Some(bm) = by_op(Operator::Sum) {
        match g.map_weights(|w| w * 3.5) {
            Ok(scaled) => match backbone_for(&scaled, Operator::Sum) {
                Ok(bs) => {
                    let same = bs.kept_edges().len() == bm.kept_edges().len()
                        && bs
                            .kept_edges()
                            .iter()
                            .zip(bm.kept_edges())
                            .all(|((k1, _), (k2, _))| k1 == k2);
                    record(
                        out,
                        "metric-backbone-scale-invariance",
                        subject,
                        same,
                        "weights scaled by 3.5".into(),
                    );
                }
                Err(e) => record(out, "metric-backbone-scale-invariance", subject, false, e.to_string()),
            },
            Err(e) => record(out, "metric-backbone-scale-invariance", subject, false, e.to_string()),
        }
    }
    if let Some(bu) = by_op(Operator::Max) {
        // strictly increasing transform preserves the weight order, and the
        // max-backbone depends on the order alone
        match g.map_weights(|w| w * w + w) {
            Ok(warped) => match backbone_for(&warped, Operator::Max) {
                Ok(bw) => {
                    let same = bw.kept_edges().len() == bu.kept_edges().len()
                        && bw
                            .kept_edges()
                            .iter()
                            .zip(bu.kept_edges())
                            .all(|((k1, _), (k2, _))| k1 == k2);
                    record(
                        out,
                        "ultrametric-backbone-order-invariance",
                        subject,
                        same,
                        "weights mapped through w^2 + w".into(),
                    );
                }
                Err(e) => record(out, "ultrametric-backbone-order-invariance", subject, false, e.to_string()),
            },
            Err(e) => record(out, "ultrametric-backbone-order-invariance", subject, false, e.to_string()),
        }
    }
}

/// Zero-weight graphs keep every edge, under every operator.
pub fn check_zero_weight_graph(g: &DistanceGraph, subject: &str, out: &mut Vec<CheckRecord>) {
    let zero = match g.map_weights(|_| 0.0) {
        Ok(z) => z,
        Err(e) => {
            record(out, "zero-weight-backbone", subject, false, e.to_string());
            return;
        }
    };
    for op in Operator::BUILTINS {
        match backbone_for(&zero, op) {
            Ok(b) => {
                let tau = b.tau().unwrap_or(f64::NAN);
                record(
                    out,
                    "zero-weight-backbone",
                    &format!("{subject} [{op}]"),
                    tau == 1.0,
                    format!("tau={tau}"),
                );
            }
            Err(e) => record(out, "zero-weight-backbone", subject, false, e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    /// Number of seeded random connected graphs.
    pub samples: usize,
    pub seed: u64,
    /// Law-check sample count per operator.
    pub law_samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            samples: 200,
            seed: 0xbac_b0e,
            law_samples: 10_000,
        }
    }
}

/// Full suite: operator laws, then the graph checks on the given input
/// (when provided) and on the random corpus.
pub fn run_suite(input: Option<(&DistanceGraph, &str)>, cfg: &SuiteConfig) -> VerificationReport {
    let mut checks = Vec::new();
    check_operator_level(cfg.law_samples, cfg.seed, &mut checks);
    if let Some((g, subject)) = input {
        check_graph(g, subject, &mut checks);
        check_zero_weight_graph(g, subject, &mut checks);
    }
    for i in 0..cfg.samples {
        let seed = cfg.seed.wrapping_add(i as u64);
        let n = 3 + (seed as usize % 14); // 3..=16 nodes
        let extra = seed as usize % (2 * n);
        let g = random_connected_graph(n, extra, seed);
        let subject = format!("random(n={n}, seed={seed})");
        check_graph(&g, &subject, &mut checks);
        if i % 10 == 0 {
            check_zero_weight_graph(&g, &subject, &mut checks);
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    VerificationReport { passed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::five_node_example;

    #[test]
    fn example_graph_passes_suite() {
        let (g, _) = five_node_example();
        let cfg = SuiteConfig {
            samples: 5,
            law_samples: 2_000,
            ..Default::default()
        };
        let report = run_suite(Some((&g, "example")), &cfg);
        let failures: Vec<_> = report.failures().collect();
        assert!(report.passed, "{failures:?}");
    }
}
