//! Command-line front end: backbone extraction, reduction comparisons,
//! the property suite, distortion histograms and dataset management.
//!
//! Exit codes: 0 success, 1 input/parse error, 2 resource cap exceeded,
//! 3 invariant violation (a structural guarantee or law check failed).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algebra::{AlgebraError, LengthOperator, Operator};
use crate::backbone::{
    extract_backbone, verify_connectivity_and_bridges, verify_sufficiency, BackboneError,
};
use crate::closure::{
    average_closure_length, mean_closure_length_streaming, sp_closure_dijkstra, ClosureError,
    ClosureMode, ClosureOptions, DEFAULT_NODE_CAP,
};
use crate::graph::{DistanceGraph, GraphError, SymmetrizeRule, WeightKind};
use crate::io::{self, datasets, IoError, LogBinnedHistogram, ReadOptions};
use crate::reductions::{minimum_spanning_tree, reduction_report, threshold_reduce, ReductionError};
use crate::verification::{run_suite, SuiteConfig};

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_RESOURCE: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Resource(String),
    Invariant(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Resource(_) => EXIT_RESOURCE,
            CliError::Invariant(_) => EXIT_INVARIANT,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Resource(m) | CliError::Invariant(m) => m,
        }
    }
}

impl From<ClosureError> for CliError {
    fn from(e: ClosureError) -> Self {
        match e {
            ClosureError::NodeCapExceeded { .. } => CliError::Resource(e.to_string()),
            ClosureError::OperatorRejected { .. } => CliError::Invariant(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Closure(c) => CliError::from(c),
            IoError::Backbone(b) => CliError::from(b),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<BackboneError> for CliError {
    fn from(e: BackboneError) -> Self {
        match e {
            BackboneError::Closure(c) => CliError::from(c),
            BackboneError::FingerprintMismatch { .. } | BackboneError::DifferentParents => {
                CliError::Invariant(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Closure(c) => CliError::from(c),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "backbone",
    version,
    about = "Distance closures and distance backbones of weighted graphs"
)]
pub struct Cli {
    /// Worker threads for closure computation (defaults to all cores).
    #[arg(long, global = true, env = "BACKBONE_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract the distance backbone; write its TSV and a summary report.
    Backbone(BackboneCmd),
    /// Compare a baseline reduction against the graph's closure.
    Compare(CompareCmd),
    /// Run the property suite on an input and a seeded random corpus.
    Verify(VerifyCmd),
    /// Log-binned histogram of semi-triangular distortions.
    Histogram(HistogramCmd),
    /// Inspect or materialize the bundled dataset registry.
    Dataset(DatasetCmd),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum WeightKindArg {
    Distance,
    Proximity,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SymmetrizeArg {
    Min,
    Mean,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Edge-list file: `source target weight` per line, `#` comments.
    #[arg(long, conflicts_with = "dataset")]
    input: Option<PathBuf>,

    /// Bundled dataset name (see `backbone dataset list`).
    #[arg(long)]
    dataset: Option<String>,

    /// Field delimiter: a single character, or `tab` / `comma` / `space`.
    /// Default: any whitespace.
    #[arg(long)]
    delimiter: Option<String>,

    #[arg(long, value_enum, default_value_t = WeightKindArg::Distance)]
    weight_kind: WeightKindArg,

    /// Merge rule for duplicate / reverse-direction entries.
    #[arg(long, value_enum, default_value_t = SymmetrizeArg::Min)]
    symmetrize: SymmetrizeArg,

    /// Restrict the input to its largest connected component.
    #[arg(long)]
    lcc: bool,

    /// Dataset cache directory (also: BACKBONE_CACHE_DIR).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl InputArgs {
    fn load(&self) -> Result<(DistanceGraph, String), CliError> {
        if let Some(name) = &self.dataset {
            let (g, spec) = datasets::load_dataset(name, self.cache_dir.as_deref())?;
            return Ok((g, spec.name.to_string()));
        }
        let Some(path) = &self.input else {
            return Err(CliError::Input(
                "either --input FILE or --dataset NAME is required".into(),
            ));
        };
        let delimiter = match self.delimiter.as_deref() {
            None => None,
            Some("tab") | Some("\\t") => Some('\t'),
            Some("comma") => Some(','),
            Some("space") => Some(' '),
            Some(s) if s.chars().count() == 1 => s.chars().next(),
            Some(s) => {
                return Err(CliError::Input(format!(
                    "--delimiter must be a single character, got {s:?}"
                )))
            }
        };
        let opts = ReadOptions {
            delimiter,
            weight_kind: match self.weight_kind {
                WeightKindArg::Distance => WeightKind::Distance,
                WeightKindArg::Proximity => WeightKind::Proximity,
            },
            symmetrize: match self.symmetrize {
                SymmetrizeArg::Min => SymmetrizeRule::Min,
                SymmetrizeArg::Mean => SymmetrizeRule::Mean,
            },
        };
        let (g, stats) = io::read_edge_list(path, &opts)?;
        if stats.build.conflicting_duplicates > 0 {
            eprintln!(
                "warning: {} duplicate entr{} with conflicting weights merged ({})",
                stats.build.conflicting_duplicates,
                if stats.build.conflicting_duplicates == 1 { "y" } else { "ies" },
                match self.symmetrize {
                    SymmetrizeArg::Min => "kept the minimum",
                    SymmetrizeArg::Mean => "averaged",
                },
            );
        }
        let g = if self.lcc {
            let (lcc, _) = g.largest_connected_component();
            lcc
        } else {
            g
        };
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "graph".into());
        Ok((g, stem))
    }
}

#[derive(Args, Debug)]
struct OperatorArgs {
    /// Path-length operator: sum, max, minkowski, product, drastic.
    #[arg(long, default_value = "sum")]
    operator: String,

    /// Minkowski exponent (r >= 1); only with --operator minkowski.
    #[arg(long)]
    r: Option<f64>,
}

impl OperatorArgs {
    fn resolve(&self) -> Result<Operator, CliError> {
        let name = self.operator.trim().to_ascii_lowercase();
        if name == "minkowski" {
            let r = self.r.ok_or_else(|| {
                CliError::Input("--operator minkowski requires --r EXPONENT".into())
            })?;
            return Ok(Operator::new_minkowski(r)?);
        }
        if self.r.is_some() {
            return Err(CliError::Input(
                "--r only applies to --operator minkowski".into(),
            ));
        }
        Ok(self.operator.parse::<Operator>()?)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Auto,
    Full,
    EdgeOnly,
}

#[derive(Args, Debug)]
struct BackboneCmd {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    operator: OperatorArgs,

    /// Closure storage: full matrix, edge-only, or pick by node cap.
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,

    /// Relative tolerance for the `distance == closure` classification
    /// (0 compares exactly).
    #[arg(long, default_value_t = crate::backbone::DEFAULT_CLASSIFICATION_TOL)]
    tol: f64,

    /// Node cap for dense full-matrix storage.
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,

    #[arg(long, default_value = ".")]
    out_dir: PathBuf,

    /// Also re-run the closure on the backbone and require equality.
    #[arg(long)]
    verify_sufficiency: bool,

    /// Skip the post-extraction connectivity and bridge checks.
    #[arg(long)]
    skip_checks: bool,
}

fn operator_slug(op: &Operator) -> String {
    let mut out = String::new();
    for c in op.id().chars() {
        if c.is_ascii_alphanumeric() || c == '.' {
            out.push(c);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

fn run_backbone(cmd: &BackboneCmd) -> Result<(), CliError> {
    let (g, stem) = cmd.input.load()?;
    let op = cmd.operator.resolve()?;
    let mode = match cmd.mode {
        ModeArg::Full => ClosureMode::FullMatrix,
        ModeArg::EdgeOnly => ClosureMode::EdgeOnly,
        ModeArg::Auto => {
            if g.node_count() <= cmd.node_cap {
                ClosureMode::FullMatrix
            } else {
                ClosureMode::EdgeOnly
            }
        }
    };
    let opts = ClosureOptions {
        mode,
        node_cap: cmd.node_cap,
        verify_operator: true,
    };
    let closure = sp_closure_dijkstra(&g, &op, &opts)?;
    let backbone = extract_backbone(&g, &closure, cmd.tol)?;

    if !cmd.skip_checks && g.is_connected() {
        let (connected, bridges_kept) = verify_connectivity_and_bridges(&g, &backbone)?;
        if !connected || !bridges_kept {
            return Err(CliError::Invariant(format!(
                "backbone structural check failed: connected={connected}, bridges kept={bridges_kept}"
            )));
        }
    }
    if cmd.verify_sufficiency {
        let verdict = verify_sufficiency(&g, &backbone, &op)?;
        if !verdict.equivalent {
            let w = verdict.witness.expect("inequivalent verdict carries a witness");
            return Err(CliError::Invariant(format!(
                "backbone closure differs at pair ({}, {}): {} vs {}",
                g.label(w.a),
                g.label(w.b),
                w.original,
                w.reduced
            )));
        }
    }

    let tau = backbone.tau()?;
    let sigma = backbone.sigma()?;
    let mean = match closure.mode() {
        ClosureMode::FullMatrix => average_closure_length(&closure)?,
        ClosureMode::EdgeOnly => mean_closure_length_streaming(&g, &op)?,
    };

    std::fs::create_dir_all(&cmd.out_dir)
        .map_err(|e| CliError::Input(format!("{}: {e}", cmd.out_dir.display())))?;
    let slug = operator_slug(&op);
    let backbone_path = cmd.out_dir.join(format!("{stem}.{slug}.backbone.tsv"));
    io::write_backbone(&backbone, &g, &backbone_path)?;
    let summary = io::build_summary(&stem, &g, cmd.node_cap)?;
    let summary_path = cmd.out_dir.join(format!("{stem}.summary.json"));
    io::write_report(&summary, &summary_path)?;

    println!("nodes: {}  edges: {}", g.node_count(), g.edge_count());
    println!("operator: {}", op.id());
    println!(
        "tau = {:.4} ({:.2}%)  sigma = {:.4} ({:.2}%)",
        tau,
        100.0 * tau,
        sigma,
        100.0 * sigma
    );
    println!("mean closure length = {mean}");
    println!("backbone: {}", backbone_path.display());
    println!("summary: {}", summary_path.display());
    Ok(())
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum AgainstArg {
    Mst,
    Threshold,
    Backbone,
}

#[derive(Args, Debug)]
struct CompareCmd {
    #[command(flatten)]
    input: InputArgs,

    /// Reduction to compare against the original graph.
    #[arg(long, value_enum)]
    against: AgainstArg,

    /// Threshold value (with --against threshold): keeps distances < alpha.
    #[arg(long)]
    alpha: Option<f64>,

    #[command(flatten)]
    operator: OperatorArgs,

    /// Output file for the JSON report (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_compare(cmd: &CompareCmd) -> Result<(), CliError> {
    let (g, _) = cmd.input.load()?;
    let op = cmd.operator.resolve()?;
    let reduced = match cmd.against {
        AgainstArg::Mst => minimum_spanning_tree(&g)?,
        AgainstArg::Threshold => {
            let alpha = cmd.alpha.ok_or_else(|| {
                CliError::Input("--against threshold requires --alpha VALUE".into())
            })?;
            threshold_reduce(&g, alpha)
        }
        AgainstArg::Backbone => {
            let closure = sp_closure_dijkstra(&g, &op, &ClosureOptions::edge_only())?;
            let b = extract_backbone(&g, &closure, crate::backbone::DEFAULT_CLASSIFICATION_TOL)?;
            b.subgraph(&g)?
        }
    };
    let report = reduction_report(&g, &reduced, &op)?;
    if report.changed_pairs > 0 && cmd.against != AgainstArg::Backbone {
        eprintln!(
            "warning: reduction changes {} closure pair(s)",
            report.changed_pairs
        );
    }
    if !report.connected {
        eprintln!(
            "warning: reduction disconnects the graph into {} components ({} pair(s) unreachable)",
            report.component_count, report.disconnected_pairs
        );
    }
    match &cmd.out {
        Some(path) => io::write_report(&report, path)?,
        None => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
    }
    Ok(())
}

#[derive(Args, Debug)]
struct VerifyCmd {
    #[command(flatten)]
    input: InputArgs,

    /// Number of seeded random graphs in the corpus.
    #[arg(long, default_value_t = 200)]
    samples: usize,

    #[arg(long, default_value_t = 0xbacb0e)]
    seed: u64,

    /// Output file for the JSON verdict (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_verify(cmd: &VerifyCmd) -> Result<(), CliError> {
    let input = if cmd.input.input.is_some() || cmd.input.dataset.is_some() {
        Some(cmd.input.load()?)
    } else {
        None
    };
    let cfg = SuiteConfig {
        samples: cmd.samples,
        seed: cmd.seed,
        ..Default::default()
    };
    let report = run_suite(input.as_ref().map(|(g, stem)| (g, stem.as_str())), &cfg);
    match &cmd.out {
        Some(path) => io::write_report(&report, path)?,
        None => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
    }
    if !report.passed {
        let mut detail = String::new();
        for failure in report.failures().take(3) {
            detail.push_str(&format!(
                "\n  {} on {}: {}",
                failure.check, failure.subject, failure.detail
            ));
        }
        return Err(CliError::Invariant(format!(
            "{} check(s) failed{detail}",
            report.failures().count()
        )));
    }
    Ok(())
}

#[derive(Args, Debug)]
struct HistogramCmd {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    operator: OperatorArgs,

    #[arg(long, default_value_t = 10)]
    bins_per_decade: usize,

    /// Output TSV path (default: <stem>.<operator>.histogram.tsv).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_histogram(cmd: &HistogramCmd) -> Result<(), CliError> {
    let (g, stem) = cmd.input.load()?;
    let op = cmd.operator.resolve()?;
    let closure = sp_closure_dijkstra(&g, &op, &ClosureOptions::edge_only())?;
    let backbone = extract_backbone(&g, &closure, crate::backbone::DEFAULT_CLASSIFICATION_TOL)?;
    let histogram = LogBinnedHistogram::from_distortions(
        backbone.removed_edges().iter().map(|r| r.distortion),
        cmd.bins_per_decade,
    );
    let out_path = cmd
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.{}.histogram.tsv", operator_slug(&op))));
    io::write_histogram(&histogram, &out_path)?;
    let stats = io::DistortionStats::from_backbone(&backbone);
    if stats.count == 0 {
        eprintln!("notice: no semi-triangular edges; histogram is empty");
    }
    println!(
        "semi-triangular edges: {} of {} ({:.2}%)",
        stats.count,
        backbone.edge_total(),
        100.0 * backbone.sigma()?
    );
    println!(
        "distortion: max = {}  log-mean = {}  log-sd = {}",
        stats.max, stats.log_mean, stats.log_sd
    );
    println!("histogram: {}", out_path.display());
    Ok(())
}

#[derive(Args, Debug)]
struct DatasetCmd {
    #[command(subcommand)]
    action: DatasetAction,
}

#[derive(Subcommand, Debug)]
enum DatasetAction {
    /// List the dataset registry.
    List,
    /// Validate a dataset's cache copy and emit its normalized edge list.
    Fetch {
        name: String,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

fn run_dataset(cmd: &DatasetCmd) -> Result<(), CliError> {
    match &cmd.action {
        DatasetAction::List => {
            println!(
                "{:<16} {:>7} {:>7}  {:<11} description",
                "name", "nodes", "edges", "status"
            );
            for spec in datasets::registry() {
                println!(
                    "{:<16} {:>7} {:>7}  {:<11} {}",
                    spec.name,
                    spec.expected_nodes,
                    spec.expected_edges,
                    if spec.available { "bundled" } else { "unavailable" },
                    spec.description
                );
            }
            Ok(())
        }
        DatasetAction::Fetch { name, cache_dir } => {
            let path = datasets::dataset_fetch(name, cache_dir.as_deref())?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

/// Parses arguments, configures the worker pool and dispatches; returns
/// the process exit code.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if workers > 0 {
            // ignore failure: the global pool may already exist in tests
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build_global();
        }
    }
    let result = match &cli.command {
        Command::Backbone(cmd) => run_backbone(cmd),
        Command::Compare(cmd) => run_compare(cmd),
        Command::Verify(cmd) => run_verify(cmd),
        Command::Histogram(cmd) => run_histogram(cmd),
        Command::Dataset(cmd) => run_dataset(cmd),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
