//! Bundled-dataset registry: raw public network files, content checksums,
//! and the per-dataset normalization recipes that turn raw weights into
//! distance graphs.
//!
//! Raw co-occurrence style weights (synapse counts, seat counts, weighted
//! paper counts) are scaled into `(0, 1]` proximities using node strengths
//! (`s_u` = sum of weights incident to `u`), then mapped to distances via
//! `d = 1/p - 1`, and finally restricted to the largest connected
//! component. The recipe is versioned data: changing it changes every
//! downstream number.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{parse_gml, IoError};
use crate::graph::{build_distance_graph, BuildOptions, DistanceGraph, RawEdge, WeightKind};

/// Environment variable naming the dataset cache directory.
pub const CACHE_DIR_ENV: &str = "BACKBONE_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    /// `source target weight` per line, whitespace separated.
    Tsv,
    /// GML with node `id`/`label` and edge `source`/`target`/`value`.
    Gml,
}

/// How duplicate (directed) entries of one pair are aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    /// Sum both directions (one-way entries count once).
    Sum,
    /// Average the entries; symmetric duplicate listings keep their value.
    Mean,
}

/// Proximity recipe applied to aggregated undirected weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `p = min(1, w / (1 + min(s_u, s_v) - w))`: shared weight over the
    /// smoothed residual strength of the weaker endpoint.
    SmoothedOverlap,
    /// `p = w / (s_u + s_v)`: shared weight over combined strengths.
    StrengthSumRatio,
    /// `p = w / (s_u + s_v - w)`: Jaccard-style strength overlap.
    StrengthJaccard,
    /// `p = w / max(w)`: plain global rescale.
    MaxScale,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Normalization::SmoothedOverlap => "smoothed-overlap",
            Normalization::StrengthSumRatio => "strength-sum-ratio",
            Normalization::StrengthJaccard => "strength-jaccard",
            Normalization::MaxScale => "max-scale",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DatasetSpec {
    pub name: &'static str,
    pub description: &'static str,
    /// Canonical public source of the raw file.
    pub url: &'static str,
    /// File name looked up in the cache directory.
    pub filename: &'static str,
    /// SHA-256 of the raw file contents (hex).
    pub sha256: &'static str,
    pub format: SourceFormat,
    pub aggregate: Aggregate,
    pub normalization: Normalization,
    /// Expected largest-connected-component size, as a sanity check.
    pub expected_nodes: usize,
    pub expected_edges: usize,
    /// Stubs mark datasets whose raw data is restricted or has no stable
    /// public source; they cannot be fetched.
    pub available: bool,
}

pub fn registry() -> &'static [DatasetSpec] {
    &[
        DatasetSpec {
            name: "net-science",
            description: "Coauthorship network of network scientists (Newman 2006)",
            url: "http://www-personal.umich.edu/~mejn/netdata/netscience.zip",
            filename: "netscience.gml",
            sha256: "ede685c5746201f51cf0c00b3c5927b1d8803555956e75dc97f973e5ba995708",
            format: SourceFormat::Gml,
            aggregate: Aggregate::Sum,
            normalization: Normalization::SmoothedOverlap,
            expected_nodes: 379,
            expected_edges: 914,
            available: true,
        },
        DatasetSpec {
            name: "cond-mat",
            description: "Condensed-matter e-print coauthorship 1995-1999 (Newman 2001)",
            url: "https://toreopsahl.com/datasets/#newman2001",
            filename: "condmat-1999.tsv",
            sha256: "e23919791a09a886103f5fd54929c358e1f5e83720213f2a5138e9bc9f0a1ee5",
            format: SourceFormat::Tsv,
            aggregate: Aggregate::Mean,
            normalization: Normalization::SmoothedOverlap,
            expected_nodes: 13861,
            expected_edges: 44619,
            available: true,
        },
        DatasetSpec {
            name: "c-elegans",
            description: "C. elegans neural network, synapse counts (Watts & Strogatz 1998)",
            url: "https://toreopsahl.com/datasets/#celegans",
            filename: "celegans-n306.tsv",
            sha256: "063f4fcc97a324fed18b3cfa24b76f9665751e211dea5ae33d2e2c7dbeec3821",
            format: SourceFormat::Tsv,
            aggregate: Aggregate::Sum,
            normalization: Normalization::StrengthSumRatio,
            expected_nodes: 297,
            expected_edges: 2148,
            available: true,
        },
        DatasetSpec {
            name: "us-airports-500",
            description: "500 busiest US airports, scheduled seats 2002 (Colizza et al. 2007)",
            url: "https://toreopsahl.com/datasets/#usairports",
            filename: "usairport-n500.tsv",
            sha256: "b6b3ee1ae6e4453350a30966e9c68da2ae5cfd43b135888bfee30f5244f0972c",
            format: SourceFormat::Tsv,
            aggregate: Aggregate::Mean,
            normalization: Normalization::StrengthJaccard,
            expected_nodes: 500,
            expected_edges: 2980,
            available: true,
        },
        DatasetSpec {
            name: "freeman",
            description: "Freeman EIES message exchanges among 32 researchers (1978)",
            url: "https://toreopsahl.com/datasets/#FreemansEIES",
            filename: "freeman-eies-messages.tsv",
            sha256: "343c65c8be926657cdbc1fc5ddd17289cbcb6fa920a98e68d33c6cee79589fed",
            format: SourceFormat::Tsv,
            aggregate: Aggregate::Sum,
            normalization: Normalization::StrengthSumRatio,
            expected_nodes: 32,
            expected_edges: 266,
            available: true,
        },
        DatasetSpec {
            name: "primary-school",
            description: "Primary-school contact network (SocioPatterns 2011)",
            url: "http://www.sociopatterns.org/datasets/primary-school-temporal-network-data/",
            filename: "primary-school.tsv",
            sha256: "",
            format: SourceFormat::Tsv,
            aggregate: Aggregate::Sum,
            normalization: Normalization::StrengthSumRatio,
            expected_nodes: 242,
            expected_edges: 8317,
            available: false,
        },
        DatasetSpec {
            name: "high-school",
            description: "US high-school contact network (Salathe et al. 2010)",
            url: "https://www.pnas.org/doi/10.1073/pnas.1009094108",
            filename: "high-school.tsv",
            sha256: "",
            format: SourceFormat::Tsv,
            aggregate: Aggregate::Sum,
            normalization: Normalization::StrengthSumRatio,
            expected_nodes: 788,
            expected_edges: 118291,
            available: false,
        },
    ]
}

pub fn find(name: &str) -> Result<&'static DatasetSpec, IoError> {
    registry()
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| IoError::UnknownDataset {
            name: name.to_string(),
            known: registry()
                .iter()
                .map(|d| d.name)
                .collect::<Vec<_>>()
                .join(", "),
        })
}

/// Candidate cache directories, most specific first.
fn cache_dirs(explicit: Option<&Path>) -> Vec<PathBuf> {
    let mut dirs = Vec::new();
    if let Some(d) = explicit {
        dirs.push(d.to_path_buf());
    }
    if let Ok(d) = std::env::var(CACHE_DIR_ENV) {
        if !d.is_empty() {
            dirs.push(PathBuf::from(d));
        }
    }
    dirs.push(PathBuf::from("data"));
    // the workspace copy, for tests and checkouts
    dirs.push(PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data")));
    dirs
}

fn locate_raw(spec: &DatasetSpec, explicit: Option<&Path>) -> Result<PathBuf, IoError> {
    for dir in cache_dirs(explicit) {
        let candidate = dir.join(spec.filename);
        if candidate.is_file() {
            return Ok(candidate);
        }
    }
    Err(IoError::DatasetMissing {
        name: spec.name.to_string(),
        filename: spec.filename.to_string(),
        url: spec.url.to_string(),
    })
}

fn verify_checksum(spec: &DatasetSpec, path: &Path) -> Result<Vec<u8>, IoError> {
    let bytes = fs::read(path).map_err(|e| super::file_err(path, e))?;
    let digest = Sha256::digest(&bytes);
    let got = digest.iter().map(|b| format!("{b:02x}")).collect::<String>();
    if got != spec.sha256 {
        return Err(IoError::ChecksumMismatch {
            name: spec.name.to_string(),
            path: path.to_path_buf(),
            expected: spec.sha256.to_string(),
            got,
        });
    }
    Ok(bytes)
}

fn parse_raw(spec: &DatasetSpec, bytes: &[u8], path: &Path) -> Result<Vec<RawEdge>, IoError> {
    let text = String::from_utf8_lossy(bytes);
    match spec.format {
        SourceFormat::Gml => parse_gml(&text, path),
        SourceFormat::Tsv => {
            let mut rows = Vec::new();
            for (ix, line) in text.lines().enumerate() {
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    continue;
                }
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                if fields.len() < 3 {
                    return Err(IoError::Parse {
                        path: path.to_path_buf(),
                        line: ix + 1,
                        message: "expected `source target weight`".into(),
                    });
                }
                let w: f64 = fields[2].parse().map_err(|_| IoError::Parse {
                    path: path.to_path_buf(),
                    line: ix + 1,
                    message: format!("weight {:?} is not a number", fields[2]),
                })?;
                rows.push(RawEdge {
                    source: fields[0].to_string(),
                    target: fields[1].to_string(),
                    weight: w,
                    line: Some(ix + 1),
                });
            }
            Ok(rows)
        }
    }
}

/// Applies the dataset recipe: aggregate directed duplicates by sum,
/// derive strengths, map to proximity, convert to distance.
fn normalize(spec: &DatasetSpec, rows: &[RawEdge], path: &Path) -> Result<Vec<RawEdge>, IoError> {
    // BTreeMaps keep accumulation order deterministic, which keeps the
    // emitted floats byte-stable across runs
    let mut acc: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    for row in rows {
        if row.source == row.target {
            continue;
        }
        if !(row.weight > 0.0) || !row.weight.is_finite() {
            return Err(IoError::Parse {
                path: path.to_path_buf(),
                line: row.line.unwrap_or(0),
                message: format!("dataset weight must be positive and finite, got {}", row.weight),
            });
        }
        let key = if row.source < row.target {
            (row.source.clone(), row.target.clone())
        } else {
            (row.target.clone(), row.source.clone())
        };
        let slot = acc.entry(key).or_insert((0.0, 0));
        slot.0 += row.weight;
        slot.1 += 1;
    }
    let pair_weight: BTreeMap<(String, String), f64> = acc
        .into_iter()
        .map(|(k, (sum, count))| {
            let w = match spec.aggregate {
                Aggregate::Sum => sum,
                Aggregate::Mean => sum / count as f64,
            };
            (k, w)
        })
        .collect();
    let mut strength: BTreeMap<&str, f64> = BTreeMap::new();
    let mut max_weight = 0.0f64;
    for ((u, v), w) in &pair_weight {
        *strength.entry(u).or_insert(0.0) += w;
        *strength.entry(v).or_insert(0.0) += w;
        max_weight = max_weight.max(*w);
    }
    let mut out = Vec::with_capacity(pair_weight.len());
    for ((u, v), w) in &pair_weight {
        let su = strength[u.as_str()];
        let sv = strength[v.as_str()];
        let p = match spec.normalization {
            Normalization::SmoothedOverlap => (w / (1.0 + su.min(sv) - w)).min(1.0),
            Normalization::StrengthSumRatio => w / (su + sv),
            Normalization::StrengthJaccard => w / (su + sv - w),
            Normalization::MaxScale => w / max_weight,
        };
        let d = (1.0 / p - 1.0).max(0.0);
        out.push(RawEdge::new(u.clone(), v.clone(), d));
    }
    Ok(out)
}

/// Loads a registry dataset from the cache as a distance graph, already
/// reduced to its largest connected component.
pub fn load_dataset(
    name: &str,
    cache_dir: Option<&Path>,
) -> Result<(DistanceGraph, &'static DatasetSpec), IoError> {
    let spec = find(name)?;
    if !spec.available {
        return Err(IoError::DatasetUnavailable {
            name: spec.name.to_string(),
            reason: format!(
                "raw data is restricted or has no stable public source; see {}",
                spec.url
            ),
        });
    }
    let raw_path = locate_raw(spec, cache_dir)?;
    let bytes = verify_checksum(spec, &raw_path)?;
    let rows = parse_raw(spec, &bytes, &raw_path)?;
    let distance_rows = normalize(spec, &rows, &raw_path)?;
    let (full, _) = build_distance_graph(
        &distance_rows,
        &BuildOptions {
            weight_kind: WeightKind::Distance,
            ..Default::default()
        },
    )?;
    let (lcc, _) = full.largest_connected_component();
    if lcc.node_count() != spec.expected_nodes || lcc.edge_count() != spec.expected_edges {
        return Err(IoError::Parse {
            path: raw_path,
            line: 0,
            message: format!(
                "dataset {} normalized to {} nodes / {} edges; expected {} / {}",
                spec.name,
                lcc.node_count(),
                lcc.edge_count(),
                spec.expected_nodes,
                spec.expected_edges
            ),
        });
    }
    Ok((lcc, spec))
}

/// Ensures the dataset is cached and valid, and emits the normalized
/// distance edge list (tab-separated, LCC only) next to the raw file.
/// Returns the path of the emitted file.
pub fn dataset_fetch(name: &str, cache_dir: Option<&Path>) -> Result<PathBuf, IoError> {
    let (lcc, spec) = load_dataset(name, cache_dir)?;
    let raw_path = locate_raw(spec, cache_dir)?;
    let dir = raw_path.parent().unwrap_or(Path::new("."));
    let out_path = dir.join(format!("{}.distance.tsv", spec.name));
    let mut body = String::new();
    body.push_str(&format!(
        "# dataset\t{}\n# normalization\t{}\n# nodes\t{}\n# edges\t{}\n",
        spec.name,
        spec.normalization,
        lcc.node_count(),
        lcc.edge_count()
    ));
    let mut rows: Vec<(String, String, f64)> = lcc
        .edges()
        .map(|(key, d)| {
            let (u, v) = key.endpoints();
            let (lu, lv) = (lcc.label(u).to_string(), lcc.label(v).to_string());
            if lu < lv {
                (lu, lv, d)
            } else {
                (lv, lu, d)
            }
        })
        .collect();
    rows.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    for (u, v, d) in rows {
        body.push_str(&format!("{u}\t{v}\t{d}\n"));
    }
    let tmp = out_path.with_extension("tsv.tmp");
    let write_result = fs::write(&tmp, &body).and_then(|_| fs::rename(&tmp, &out_path));
    match write_result {
        Ok(()) => Ok(out_path),
        Err(_) => {
            // cache directory may be read-only; fall back to a temp location
            let fallback_dir = std::env::temp_dir().join("backbone-datasets");
            fs::create_dir_all(&fallback_dir)
                .map_err(|e| super::file_err(&fallback_dir, e))?;
            let fallback = fallback_dir.join(format!("{}.distance.tsv", spec.name));
            fs::write(&fallback, &body).map_err(|e| super::file_err(&fallback, e))?;
            Ok(fallback)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_lists_registry() {
        let err = find("nope").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("net-science"));
        assert!(msg.contains("us-airports-500"));
    }

    #[test]
    fn stubs_refuse_to_load() {
        let err = load_dataset("primary-school", None).unwrap_err();
        assert!(matches!(err, IoError::DatasetUnavailable { .. }));
    }

    #[test]
    fn checksum_mismatch_is_refused() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("celegans-n306.tsv"), "1 2 3\n").unwrap();
        let err = load_dataset("c-elegans", Some(dir.path())).unwrap_err();
        assert!(matches!(err, IoError::ChecksumMismatch { .. }));
    }

    #[test]
    fn celegans_loads_to_expected_lcc() {
        let (g, spec) = load_dataset("c-elegans", None).unwrap();
        assert_eq!(g.node_count(), 297);
        assert_eq!(g.edge_count(), 2148);
        assert_eq!(spec.normalization, Normalization::StrengthSumRatio);
        assert!(g.is_connected());
    }

    #[test]
    fn netscience_loads_to_expected_lcc() {
        let (g, _) = load_dataset("net-science", None).unwrap();
        assert_eq!(g.node_count(), 379);
        assert_eq!(g.edge_count(), 914);
    }

    #[test]
    fn fetch_emits_stable_normalized_file() {
        let dir = tempfile::tempdir().unwrap();
        fs::copy(
            concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/freeman-eies-messages.tsv"),
            dir.path().join("freeman-eies-messages.tsv"),
        )
        .unwrap();
        let p1 = dataset_fetch("freeman", Some(dir.path())).unwrap();
        let bytes1 = fs::read(&p1).unwrap();
        let p2 = dataset_fetch("freeman", Some(dir.path())).unwrap();
        let bytes2 = fs::read(&p2).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(bytes1, bytes2);
        // emitted file reads back as a distance edge list
        let opts = super::super::ReadOptions {
            delimiter: Some('\t'),
            ..Default::default()
        };
        let (g, _) = super::super::read_edge_list(&p1, &opts).unwrap();
        assert_eq!(g.node_count(), 32);
        assert_eq!(g.edge_count(), 266);
    }
}
