//! Ingestion and serialized outputs: edge lists in, backbone TSVs, JSON
//! reports, closure matrices and log-binned histograms out. All writers
//! are byte-stable for a fixed input.

pub mod datasets;

use std::fs;
use std::io::{BufWriter, Read, Write as _};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::backbone::Backbone;
use crate::closure::{ClosureError, ClosureResult};
use crate::graph::{
    build_distance_graph, BuildStats, DistanceGraph, GraphError, RawEdge, SymmetrizeRule,
    WeightKind,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: no edges found")]
    EmptyInput { path: PathBuf },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error("unknown dataset {name:?}; registry has: {known}")]
    UnknownDataset { name: String, known: String },
    #[error("dataset {name}: checksum mismatch for {path} (expected {expected}, got {got})")]
    ChecksumMismatch {
        name: String,
        path: PathBuf,
        expected: String,
        got: String,
    },
    #[error(
        "dataset {name} not found in cache; place {filename} (from {url}) in the cache \
         directory or set BACKBONE_CACHE_DIR"
    )]
    DatasetMissing {
        name: String,
        filename: String,
        url: String,
    },
    #[error("dataset {name} is a registry stub: {reason}")]
    DatasetUnavailable { name: String, reason: String },
    #[error("closure matrix header is malformed: {0}")]
    BadClosureHeader(String),
    #[error(transparent)]
    Backbone(#[from] crate::backbone::BackboneError),
    #[error(transparent)]
    Reduction(#[from] crate::reductions::ReductionError),
}

pub(crate) fn file_err(path: &Path, source: std::io::Error) -> IoError {
    IoError::File {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone)]
pub struct ReadOptions {
    /// Field delimiter; `None` splits on any run of whitespace.
    pub delimiter: Option<char>,
    pub weight_kind: WeightKind,
    pub symmetrize: SymmetrizeRule,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions {
            delimiter: None,
            weight_kind: WeightKind::Distance,
            symmetrize: SymmetrizeRule::Min,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ReadStats {
    pub lines: usize,
    pub header_skipped: bool,
    pub build: BuildStats,
}

/// Parses a delimited edge list: `source target weight` per line, `#`
/// comments, one optional header line.
pub fn read_edge_list(
    path: impl AsRef<Path>,
    opts: &ReadOptions,
) -> Result<(DistanceGraph, ReadStats), IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| file_err(path, e))?;
    let (rows, stats) = parse_edge_list_text(&text, path, opts)?;
    let build_opts = crate::graph::BuildOptions {
        weight_kind: opts.weight_kind,
        symmetrize: opts.symmetrize,
    };
    let (graph, build) = build_distance_graph(&rows, &build_opts)?;
    Ok((
        graph,
        ReadStats {
            build,
            ..stats
        },
    ))
}

fn parse_edge_list_text(
    text: &str,
    path: &Path,
    opts: &ReadOptions,
) -> Result<(Vec<RawEdge>, ReadStats), IoError> {
    let mut rows = Vec::new();
    let mut stats = ReadStats::default();
    let mut first_data_line = true;
    for (ix, line) in text.lines().enumerate() {
        let lineno = ix + 1;
        stats.lines += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = match opts.delimiter {
            Some(d) => trimmed.split(d).map(str::trim).collect(),
            None => trimmed.split_whitespace().collect(),
        };
        if fields.len() < 3 {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("expected `source target weight`, got {} field(s)", fields.len()),
            });
        }
        match fields[2].parse::<f64>() {
            Ok(w) => {
                rows.push(RawEdge {
                    source: fields[0].to_string(),
                    target: fields[1].to_string(),
                    weight: w,
                    line: Some(lineno),
                });
                first_data_line = false;
            }
            Err(_) if first_data_line => {
                // a single leading header line is tolerated
                stats.header_skipped = true;
                first_data_line = false;
            }
            Err(_) => {
                return Err(IoError::Parse {
                    path: path.to_path_buf(),
                    line: lineno,
                    message: format!("weight {:?} is not a number", fields[2]),
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(IoError::EmptyInput {
            path: path.to_path_buf(),
        });
    }
    Ok((rows, stats))
}

/// Minimal GML reader covering the classic `node [...] / edge [...]`
/// collections: node `id`/`label`, edge `source`/`target`/`value`.
pub fn parse_gml(text: &str, path: &Path) -> Result<Vec<RawEdge>, IoError> {
    let tokens = gml_tokens(text);
    let mut labels: std::collections::HashMap<String, String> = std::collections::HashMap::new();
    let mut edges: Vec<(String, String, f64)> = Vec::new();
    let mut i = 0;
    let parse_block = |tokens: &[String], start: usize| -> Result<(Vec<(String, String)>, usize), String> {
        if tokens.get(start).map(String::as_str) != Some("[") {
            return Err("expected '['".into());
        }
        let mut kv = Vec::new();
        let mut j = start + 1;
        while j < tokens.len() && tokens[j] != "]" {
            let key = tokens[j].clone();
            let Some(value) = tokens.get(j + 1) else {
                return Err(format!("dangling key {key:?}"));
            };
            if value == "[" {
                // nested block: skip it wholesale
                let mut depth = 1;
                j += 2;
                while j < tokens.len() && depth > 0 {
                    match tokens[j].as_str() {
                        "[" => depth += 1,
                        "]" => depth -= 1,
                        _ => {}
                    }
                    j += 1;
                }
                continue;
            }
            kv.push((key, value.clone()));
            j += 2;
        }
        Ok((kv, j + 1))
    };
    while i < tokens.len() {
        match tokens[i].as_str() {
            "node" => {
                let (kv, next) = parse_block(&tokens, i + 1).map_err(|m| IoError::Parse {
                    path: path.to_path_buf(),
                    line: 0,
                    message: format!("GML node block: {m}"),
                })?;
                let mut id = None;
                let mut label = None;
                for (k, v) in kv {
                    match k.as_str() {
                        "id" => id = Some(v),
                        "label" => label = Some(v),
                        _ => {}
                    }
                }
                if let Some(id) = id {
                    labels.insert(id.clone(), label.unwrap_or(id));
                }
                i = next;
            }
            "edge" => {
                let (kv, next) = parse_block(&tokens, i + 1).map_err(|m| IoError::Parse {
                    path: path.to_path_buf(),
                    line: 0,
                    message: format!("GML edge block: {m}"),
                })?;
                let mut source = None;
                let mut target = None;
                let mut value = 1.0f64;
                for (k, v) in kv {
                    match k.as_str() {
                        "source" => source = Some(v),
                        "target" => target = Some(v),
                        "value" | "weight" => {
                            value = v.parse().map_err(|_| IoError::Parse {
                                path: path.to_path_buf(),
                                line: 0,
                                message: format!("GML edge value {v:?} is not a number"),
                            })?;
                        }
                        _ => {}
                    }
                }
                match (source, target) {
                    (Some(s), Some(t)) => edges.push((s, t, value)),
                    _ => {
                        return Err(IoError::Parse {
                            path: path.to_path_buf(),
                            line: 0,
                            message: "GML edge block missing source/target".into(),
                        })
                    }
                }
                i = next;
            }
            _ => i += 1,
        }
    }
    if edges.is_empty() {
        return Err(IoError::EmptyInput {
            path: path.to_path_buf(),
        });
    }
    Ok(edges
        .into_iter()
        .map(|(s, t, w)| {
            let sl = labels.get(&s).cloned().unwrap_or(s);
            let tl = labels.get(&t).cloned().unwrap_or(t);
            RawEdge::new(sl, tl, w)
        })
        .collect())
}

fn gml_tokens(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut s = String::new();
            for c in chars.by_ref() {
                if c == '"' {
                    break;
                }
                s.push(c);
            }
            tokens.push(s);
        } else if c == '[' || c == ']' {
            chars.next();
            tokens.push(c.to_string());
        } else {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() || c == '[' || c == ']' {
                    break;
                }
                s.push(c);
                chars.next();
            }
            tokens.push(s);
        }
    }
    tokens
}

/// Writes the backbone as a TSV sorted by canonical edge key:
/// `u_label  v_label  distance  closure  distortion  class`.
pub fn write_backbone(
    b: &Backbone,
    g: &DistanceGraph,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| file_err(path, e))?;
    let mut out = BufWriter::new(file);
    let mut rows: Vec<(crate::graph::EdgeKey, f64, f64, f64, &str)> = Vec::new();
    for (key, d) in b.kept_edges() {
        rows.push((*key, *d, *d, 1.0, "triangular"));
    }
    for r in b.removed_edges() {
        rows.push((r.key, r.direct, r.closure, r.distortion, "semi-triangular"));
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    writeln!(out, "# operator\t{}", b.operator_id()).map_err(|e| file_err(path, e))?;
    writeln!(out, "u\tv\tdistance\tclosure\tdistortion\tclass").map_err(|e| file_err(path, e))?;
    for (key, d, c, s, class) in rows {
        let (u, v) = key.endpoints();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            g.label(u),
            g.label(v),
            d,
            c,
            s,
            class
        )
        .map_err(|e| file_err(path, e))?;
    }
    Ok(())
}

/// Reads a backbone TSV back into (kept, removed) label pairs with weights.
pub fn read_backbone_edges(
    path: impl AsRef<Path>,
) -> Result<Vec<(String, String, f64, String)>, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| file_err(path, e))?;
    let mut rows = Vec::new();
    for (ix, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with("u\t") {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 6 {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                line: ix + 1,
                message: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let weight: f64 = fields[2].parse().map_err(|_| IoError::Parse {
            path: path.to_path_buf(),
            line: ix + 1,
            message: format!("bad distance {:?}", fields[2]),
        })?;
        rows.push((
            fields[0].to_string(),
            fields[1].to_string(),
            weight,
            fields[5].to_string(),
        ));
    }
    Ok(rows)
}

/// Log-binned histogram of semi-triangular distortions. Bin `i` covers
/// `[ratio^i, ratio^(i+1))` starting at `s = 1`; values equal to 1
/// (triangular edges) land in the underflow counter, never in a bin.
#[derive(Debug, Clone, Serialize)]
pub struct LogBinnedHistogram {
    pub bins_per_decade: usize,
    pub ratio: f64,
    /// Count of `s <= 1` inputs (triangular edges, excluded from bins).
    pub underflow: u64,
    /// Count of infinite distortions (closure value 0 under a positive
    /// direct distance); kept out of the finite bins.
    pub infinite: u64,
    pub counts: Vec<u64>,
}

impl LogBinnedHistogram {
    pub fn from_distortions(values: impl IntoIterator<Item = f64>, bins_per_decade: usize) -> Self {
        assert!(bins_per_decade >= 1);
        let mut underflow = 0u64;
        let mut infinite = 0u64;
        // at least one decade of bins, even when empty
        let mut counts = vec![0u64; bins_per_decade];
        for s in values {
            if s.is_infinite() {
                infinite += 1;
                continue;
            }
            if s <= 1.0 {
                underflow += 1;
                continue;
            }
            let bin = (s.log10() * bins_per_decade as f64).floor() as usize;
            if bin >= counts.len() {
                counts.resize(bin + 1, 0);
            }
            counts[bin] += 1;
        }
        LogBinnedHistogram {
            bins_per_decade,
            ratio: 10f64.powf(1.0 / bins_per_decade as f64),
            underflow,
            infinite,
            counts,
        }
    }

    pub fn bin_right_edge(&self, ix: usize) -> f64 {
        10f64.powf((ix + 1) as f64 / self.bins_per_decade as f64)
    }

    pub fn total_binned(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Two-column TSV: `bin_right_edge  count`.
pub fn write_histogram(h: &LogBinnedHistogram, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| file_err(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(
        out,
        "# bins_per_decade\t{}\tunderflow\t{}\tinfinite\t{}",
        h.bins_per_decade, h.underflow, h.infinite
    )
    .map_err(|e| file_err(path, e))?;
    for (ix, count) in h.counts.iter().enumerate() {
        writeln!(out, "{}\t{}", h.bin_right_edge(ix), count).map_err(|e| file_err(path, e))?;
    }
    Ok(())
}

/// Distortion distribution summary over the semi-triangular edges.
#[derive(Debug, Clone, Serialize)]
pub struct DistortionStats {
    pub count: usize,
    pub infinite: usize,
    pub log_mean: f64,
    pub log_sd: f64,
    pub max: f64,
}

impl DistortionStats {
    pub fn from_backbone(b: &Backbone) -> Self {
        let finite: Vec<f64> = b
            .removed_edges()
            .iter()
            .map(|r| r.distortion)
            .filter(|s| s.is_finite())
            .collect();
        let infinite = b.removed_edges().len() - finite.len();
        let (log_mean, log_sd, max) = if finite.is_empty() {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let logs: Vec<f64> = finite.iter().map(|s| s.ln()).collect();
            let mean = logs.iter().sum::<f64>() / logs.len() as f64;
            let var = logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>()
                / logs.len() as f64;
            let max = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (mean, var.sqrt(), max)
        };
        DistortionStats {
            count: b.removed_edges().len(),
            infinite,
            log_mean,
            log_sd,
            max,
        }
    }
}

/// One-row dataset summary: sizes, density, backbone fractions, metric
/// closure mean, clustering of the graph and both backbones, distortion
/// statistics.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryReport {
    pub name: String,
    pub nodes: usize,
    pub edges: usize,
    pub density_pct: f64,
    pub tau_metric_pct: f64,
    pub tau_ultrametric_pct: f64,
    pub tau_ratio_pct: f64,
    pub mean_metric_closure: f64,
    pub clustering_original: f64,
    pub clustering_metric_backbone: f64,
    pub clustering_ultrametric_backbone: f64,
    pub distortion: DistortionStats,
}

/// Assembles the dataset-style summary row: density, metric and
/// ultrametric backbone fractions, metric closure mean, clustering of the
/// graph and both backbones, and the metric distortion statistics.
pub fn build_summary(
    name: &str,
    g: &DistanceGraph,
    node_cap: usize,
) -> Result<SummaryReport, IoError> {
    use crate::algebra::Operator;
    use crate::backbone::{extract_backbone, DEFAULT_CLASSIFICATION_TOL};
    use crate::closure::{
        average_closure_length, mean_closure_length_streaming, sp_closure_dijkstra, ClosureMode,
        ClosureOptions,
    };
    use crate::reductions::average_clustering_coefficient;

    let full_ok = g.node_count() <= node_cap;
    let sum_opts = ClosureOptions {
        mode: if full_ok {
            ClosureMode::FullMatrix
        } else {
            ClosureMode::EdgeOnly
        },
        node_cap,
        ..Default::default()
    };
    let c_sum = sp_closure_dijkstra(g, &Operator::Sum, &sum_opts)?;
    let mean_metric = if full_ok {
        average_closure_length(&c_sum)?
    } else {
        mean_closure_length_streaming(g, &Operator::Sum)?
    };
    let b_metric = extract_backbone(g, &c_sum, DEFAULT_CLASSIFICATION_TOL)?;
    let c_max = sp_closure_dijkstra(g, &Operator::Max, &ClosureOptions::edge_only())?;
    let b_ultra = extract_backbone(g, &c_max, DEFAULT_CLASSIFICATION_TOL)?;

    let tau_m = b_metric.tau()?;
    let tau_u = b_ultra.tau()?;
    let clustering_original = average_clustering_coefficient(g)?;
    let clustering_metric = average_clustering_coefficient(&b_metric.subgraph(g)?)?;
    let clustering_ultra = average_clustering_coefficient(&b_ultra.subgraph(g)?)?;

    Ok(SummaryReport {
        name: name.to_string(),
        nodes: g.node_count(),
        edges: g.edge_count(),
        density_pct: 100.0 * g.density()?,
        tau_metric_pct: 100.0 * tau_m,
        tau_ultrametric_pct: 100.0 * tau_u,
        tau_ratio_pct: 100.0 * tau_u / tau_m,
        mean_metric_closure: mean_metric,
        clustering_original,
        clustering_metric_backbone: clustering_metric,
        clustering_ultrametric_backbone: clustering_ultra,
        distortion: DistortionStats::from_backbone(&b_metric),
    })
}

/// Fixed-key-order JSON (struct order), pretty-printed, trailing newline.
pub fn write_report<T: Serialize>(report: &T, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| file_err(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, report).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    writeln!(out).map_err(|e| file_err(path, e))?;
    Ok(())
}

const CLOSURE_MAGIC: &[u8; 8] = b"BBCLOS01";

/// Dense closure matrix as little-endian binary: magic, `n`, operator id,
/// then `n*n` row-major f64 values.
pub fn write_closure_binary(c: &ClosureResult, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let (n, values) = c.matrix()?;
    let file = fs::File::create(path).map_err(|e| file_err(path, e))?;
    let mut out = BufWriter::new(file);
    out.write_all(CLOSURE_MAGIC).map_err(|e| file_err(path, e))?;
    out.write_all(&(n as u64).to_le_bytes())
        .map_err(|e| file_err(path, e))?;
    let id = c.operator_id().as_bytes();
    out.write_all(&(id.len() as u16).to_le_bytes())
        .map_err(|e| file_err(path, e))?;
    out.write_all(id).map_err(|e| file_err(path, e))?;
    for v in values {
        out.write_all(&v.to_le_bytes()).map_err(|e| file_err(path, e))?;
    }
    Ok(())
}

/// Reads back a dense closure matrix written by [`write_closure_binary`].
/// The caller supplies the source graph so the fingerprint can be restored.
pub fn read_closure_binary(
    path: impl AsRef<Path>,
    g: &DistanceGraph,
) -> Result<ClosureResult, IoError> {
    let path = path.as_ref();
    let mut file = fs::File::open(path).map_err(|e| file_err(path, e))?;
    let mut magic = [0u8; 8];
    file.read_exact(&mut magic).map_err(|e| file_err(path, e))?;
    if &magic != CLOSURE_MAGIC {
        return Err(IoError::BadClosureHeader("wrong magic".into()));
    }
    let mut buf8 = [0u8; 8];
    file.read_exact(&mut buf8).map_err(|e| file_err(path, e))?;
    let n = u64::from_le_bytes(buf8) as usize;
    let mut buf2 = [0u8; 2];
    file.read_exact(&mut buf2).map_err(|e| file_err(path, e))?;
    let id_len = u16::from_le_bytes(buf2) as usize;
    let mut id = vec![0u8; id_len];
    file.read_exact(&mut id).map_err(|e| file_err(path, e))?;
    let operator_id = String::from_utf8(id)
        .map_err(|e| IoError::BadClosureHeader(format!("operator id: {e}")))?;
    if n != g.node_count() {
        return Err(IoError::BadClosureHeader(format!(
            "matrix is {n}x{n} but graph has {} nodes",
            g.node_count()
        )));
    }
    let mut values = vec![0.0f64; n * n];
    for v in values.iter_mut() {
        file.read_exact(&mut buf8).map_err(|e| file_err(path, e))?;
        *v = f64::from_le_bytes(buf8);
    }
    Ok(ClosureResult::from_matrix(
        operator_id,
        g.fingerprint(),
        n,
        values,
    ))
}

/// Dense closure as a TSV matrix, one row per node, `inf` for unreachable.
pub fn write_closure_tsv(c: &ClosureResult, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let (n, values) = c.matrix()?;
    let file = fs::File::create(path).map_err(|e| file_err(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "# n\t{n}\toperator\t{}", c.operator_id()).map_err(|e| file_err(path, e))?;
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| values[i * n + j].to_string()).collect();
        writeln!(out, "{}", row.join("\t")).map_err(|e| file_err(path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Operator;
    use crate::backbone::extract_backbone;
    use crate::closure::{sp_closure_dijkstra, ClosureOptions};
    use crate::corpus::five_node_example;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_proximity_edge_list() {
        let f = write_tmp("a b 0.5\nb c 0.5\n");
        let opts = ReadOptions {
            weight_kind: WeightKind::Proximity,
            ..Default::default()
        };
        let (g, stats) = read_edge_list(f.path(), &opts).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(!stats.header_skipped);
        for (_, d) in g.edges() {
            assert_eq!(d, 1.0);
        }
    }

    #[test]
    fn rejects_negative_weight_with_line() {
        let f = write_tmp("a b -1\n");
        let err = read_edge_list(f.path(), &ReadOptions::default()).unwrap_err();
        match err {
            IoError::Graph(GraphError::NegativeWeight { line, .. }) => {
                assert_eq!(line, Some(1))
            }
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn rejects_malformed_line_with_number() {
        let f = write_tmp("a b 1.0\na b c d\n");
        let err = read_edge_list(f.path(), &ReadOptions::default()).unwrap_err();
        match err {
            IoError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = write_tmp("# just a comment\n");
        assert!(matches!(
            read_edge_list(f.path(), &ReadOptions::default()),
            Err(IoError::EmptyInput { .. })
        ));
    }

    #[test]
    fn header_line_is_tolerated() {
        let f = write_tmp("source target weight\na b 2.0\n");
        let (g, stats) = read_edge_list(f.path(), &ReadOptions::default()).unwrap();
        assert!(stats.header_skipped);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn csv_delimiter_supported() {
        let f = write_tmp("a,b,1.5\nb,c,2.5\n");
        let opts = ReadOptions {
            delimiter: Some(','),
            ..Default::default()
        };
        let (g, _) = read_edge_list(f.path(), &opts).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn gml_parse_basics() {
        let text = r#"
            Creator "someone"
            graph
            [
              node [ id 0 label "alpha beta" ]
              node [ id 1 label "gamma" ]
              edge [ source 0 target 1 value 2.5 ]
            ]
        "#;
        let rows = parse_gml(text, Path::new("test.gml")).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].source, "alpha beta");
        assert_eq!(rows[0].target, "gamma");
        assert_eq!(rows[0].weight, 2.5);
    }

    #[test]
    fn backbone_tsv_round_trip_and_stability() {
        let (g, _) = five_node_example();
        let c = sp_closure_dijkstra(&g, &Operator::Sum, &ClosureOptions::default()).unwrap();
        let b = extract_backbone(&g, &c, 0.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("b1.tsv");
        let p2 = dir.path().join("b2.tsv");
        write_backbone(&b, &g, &p1).unwrap();
        write_backbone(&b, &g, &p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());

        let rows = read_backbone_edges(&p1).unwrap();
        assert_eq!(rows.len(), 7);
        let kept: Vec<_> = rows.iter().filter(|r| r.3 == "triangular").collect();
        assert_eq!(kept.len(), 5);
        // kept edges round-trip their exact weights
        for (u, v, d, _) in kept.iter().map(|r| (&r.0, &r.1, r.2, &r.3)) {
            let (ui, vi) = (g.node_id(u).unwrap(), g.node_id(v).unwrap());
            assert_eq!(g.weight(ui, vi), Some(d));
        }
    }

    #[test]
    fn histogram_binning_and_counts() {
        let h = LogBinnedHistogram::from_distortions([1.0, 1.0, 4.5, 1.125, f64::INFINITY], 10);
        assert_eq!(h.underflow, 2);
        assert_eq!(h.infinite, 1);
        assert_eq!(h.total_binned(), 2);
        // 4.5 -> bin floor(log10(4.5)*10) = 6; 1.125 -> bin 0
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[6], 1);
    }

    #[test]
    fn empty_histogram_written_with_zero_counts() {
        let h = LogBinnedHistogram::from_distortions(std::iter::empty(), 10);
        assert_eq!(h.total_binned(), 0);
        assert_eq!(h.counts.len(), 10);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("h.tsv");
        write_histogram(&h, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 11); // header + 10 bins
    }

    #[test]
    fn closure_binary_round_trip() {
        let (g, _) = five_node_example();
        let c = sp_closure_dijkstra(&g, &Operator::Sum, &ClosureOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.bin");
        write_closure_binary(&c, &p).unwrap();
        let back = read_closure_binary(&p, &g).unwrap();
        assert_eq!(back.operator_id(), c.operator_id());
        let (n, want) = c.matrix().unwrap();
        let (_, got) = back.matrix().unwrap();
        assert_eq!(want, got);
        assert_eq!(n, 5);
    }

    #[test]
    fn summary_of_the_example_graph() {
        let (g, _) = five_node_example();
        let s = build_summary("example", &g, 20_000).unwrap();
        assert_eq!(s.nodes, 5);
        assert_eq!(s.edges, 7);
        assert_eq!(s.density_pct, 70.0);
        assert_eq!(s.tau_metric_pct, 100.0 * (5.0 / 7.0));
        assert_eq!(s.tau_ultrametric_pct, 100.0 * (4.0 / 7.0));
        assert!(s.tau_ultrametric_pct <= s.tau_metric_pct);
        assert_eq!(s.mean_metric_closure, 4.9);
        assert_eq!(s.distortion.count, 2);
        assert_eq!(s.distortion.max, 4.5);
        // the two backbones strip all triangles from this graph
        assert!(s.clustering_original > 0.0);
        assert_eq!(s.clustering_metric_backbone, 0.0);
        assert_eq!(s.clustering_ultrametric_backbone, 0.0);
    }

    #[test]
    fn report_json_has_fixed_key_order() {
        let (g, _) = five_node_example();
        let c = sp_closure_dijkstra(&g, &Operator::Sum, &ClosureOptions::default()).unwrap();
        let b = extract_backbone(&g, &c, 0.0).unwrap();
        let stats = DistortionStats::from_backbone(&b);
        let report = SummaryReport {
            name: "example".into(),
            nodes: g.node_count(),
            edges: g.edge_count(),
            density_pct: 70.0,
            tau_metric_pct: 100.0 * b.tau().unwrap(),
            tau_ultrametric_pct: 0.0,
            tau_ratio_pct: 0.0,
            mean_metric_closure: 4.9,
            clustering_original: 0.0,
            clustering_metric_backbone: 0.0,
            clustering_ultrametric_backbone: 0.0,
            distortion: stats,
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_report(&report, &p).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let name_pos = text.find("\"name\"").unwrap();
        let tau_pos = text.find("\"tau_metric_pct\"").unwrap();
        let dist_pos = text.find("\"distortion\"").unwrap();
        assert!(name_pos < tau_pos && tau_pos < dist_pos);
    }
}
