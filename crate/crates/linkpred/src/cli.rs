//! Command-line driver. Every command resolves its parameters, runs the
//! corresponding library calls, writes its outputs into `--out`, and
//! finishes with a `manifest.json` recording parameters, input digests,
//! derived values, seeds, and output digests.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal
//! invariant violation. All randomness flows from `--seed` through named
//! sub-streams (`generation`, `negative-sampling`, `balancing`, `folds`),
//! so stages are independently reproducible. `--threads` changes wall
//! time only, never output bytes, and is deliberately absent from the
//! manifest.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::dataset::{
    balance, build_classification_with_roster, build_threshold_with_roster, read_dataset,
    verify_dataset, write_dataset, Dataset,
};
use crate::error::{Error, Result};
use crate::features::{
    compute_global_features, feature_histogram, FeatureColumn, FeatureTable, ValueTransform,
    DEFAULT_HITS_MAX_ITER, DEFAULT_HITS_TOL,
};
use crate::graph::{
    load_edge_list, snapshot_at, window_edges, write_edge_list, ObservationWindow, Snapshot,
    TemporalGraph, VertexId,
};
use crate::learners::{
    cross_validate, rank_features, train, tree_pruning_effect, TrainConfig, Variant,
};
use crate::manifest::{derive_seed, RunManifest};
use crate::ranker::{predict_links, RankerConfig, Scoring};
use crate::synthgen::{degree_histogram, generate, links_per_step, GenConfig};

#[derive(Parser)]
#[command(
    name = "linkpred",
    version,
    about = "Topology-only link prediction toolkit"
)]
struct Cli {
    /// Worker threads (0 = library default). Affects wall time only.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic temporal graph with a plantable signal.
    Gen(GenArgs),
    /// Load an edge list and report snapshot statistics as JSON.
    IngestStats(IngestStatsArgs),
    /// Compute per-vertex global features and export them as CSV.
    Features(FeaturesArgs),
    /// Export degree/step histograms and feature histograms.
    Histogram(HistogramArgs),
    /// Rank link candidates for users via threshold-gated retrieval.
    Rank(RankArgs),
    /// Build a labeled real/false link dataset.
    BuildDataset(BuildDatasetArgs),
    /// Balance a dataset by undersampling the majority class.
    Balance(BalanceArgs),
    /// Rank the six features by information gain.
    RankFeatures(RankFeaturesArgs),
    /// Train one classifier and save it as JSON.
    Train(TrainArgs),
    /// Cross-validate one classifier and export the metrics report.
    Evaluate(EvaluateArgs),
    /// Run the end-to-end experiment pipeline.
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    m_per_step: usize,
    #[arg(long, default_value_t = 0.8)]
    t0_fraction: f64,
    #[arg(long, default_value_t = 0.6)]
    triangle_prob: f64,
    #[arg(long, default_value_t = 0)]
    window_edges: usize,
    #[arg(long, default_value_t = 0.0)]
    authority_bias: f64,
    #[arg(long, default_value_t = 0.0)]
    locality_bias: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IngestStatsArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Snapshot cutoff; defaults to the maximum timestamp.
    #[arg(long)]
    t0: Option<i64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct HitsArgs {
    #[arg(long, default_value_t = DEFAULT_HITS_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_HITS_MAX_ITER)]
    max_iter: usize,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    t0: i64,
    #[command(flatten)]
    hits: HitsArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct HistogramArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    t0: i64,
    #[arg(long, default_value_t = 20)]
    bins: usize,
    /// Apply ln(x+1) before binning feature values.
    #[arg(long, default_value_t = false)]
    log1p: bool,
    /// Divisor mapping timestamps to steps (e.g. 86400 for day buckets).
    #[arg(long, default_value_t = 1)]
    step_divisor: i64,
    #[command(flatten)]
    hits: HitsArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    t0: i64,
    #[arg(long, default_value_t = 0.1)]
    th: f64,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// authority | degree | transitivity | weighted:<a>,<d>,<t>
    #[arg(long, default_value = "authority")]
    scoring: String,
    /// Query users (repeatable); defaults to every vertex.
    #[arg(long = "user", action = ArgAction::Append)]
    users: Vec<u64>,
    /// File with one user id per line.
    #[arg(long)]
    users_file: Option<PathBuf>,
    #[command(flatten)]
    hits: HitsArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildDatasetArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    t0: i64,
    #[arg(long)]
    t_end: i64,
    /// classification | threshold
    #[arg(long)]
    mode: String,
    #[arg(long, default_value_t = 0.1)]
    th: f64,
    #[arg(long, default_value_t = 10)]
    neg_cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional roster of vertices that count as existing at the cutoff.
    #[arg(long)]
    roster: Option<PathBuf>,
    #[command(flatten)]
    hits: HitsArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BalanceArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RankFeaturesArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LearnerArgs {
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
    #[arg(long, default_value_t = 2)]
    min_leaf: usize,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 0.25)]
    pruning_confidence: f64,
    #[arg(long, default_value_t = false)]
    no_prune: bool,
    #[arg(long, default_value_t = 1e-9)]
    variance_floor: f64,
}

impl LearnerArgs {
    fn train_config(&self, seed: u64) -> TrainConfig {
        let mut cfg = TrainConfig::default();
        cfg.logistic.learning_rate = self.learning_rate;
        cfg.logistic.epochs = self.epochs;
        cfg.logistic.l2 = self.l2;
        cfg.tree.min_leaf = self.min_leaf;
        cfg.tree.max_depth = self.max_depth;
        cfg.tree.pruning_confidence = self.pruning_confidence;
        cfg.tree.prune = !self.no_prune;
        cfg.nb.variance_floor = self.variance_floor;
        cfg.rng_seed = seed;
        cfg
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// nb | logistic | tree
    #[arg(long)]
    variant: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    learner: LearnerArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// nb | logistic | tree
    #[arg(long)]
    variant: String,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    learner: LearnerArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    t0: i64,
    #[arg(long)]
    t_end: i64,
    /// classification | threshold
    #[arg(long)]
    mode: String,
    /// Locality thresholds for threshold mode (repeatable).
    #[arg(long = "th", action = ArgAction::Append)]
    th: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    neg_cap: usize,
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solvers to evaluate (repeatable); defaults to all three.
    #[arg(long = "variant", action = ArgAction::Append)]
    variants: Vec<String>,
    #[arg(long)]
    roster: Option<PathBuf>,
    #[command(flatten)]
    hits: HitsArgs,
    #[command(flatten)]
    learner: LearnerArgs,
    #[arg(long)]
    out: PathBuf,
}

/// Parses and executes a command line (excluding the binary name is fine;
/// clap handles both). Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_default_env().try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            return 1;
        }
    };

    let body = || match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };

    if cli.threads > 0 {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build()
        {
            Ok(pool) => pool.install(body),
            Err(e) => {
                eprintln!("error: failed to build thread pool: {e}");
                1
            }
        }
    } else {
        body()
    }
}

fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::IngestStats(args) => cmd_ingest_stats(args),
        Command::Features(args) => cmd_features(args),
        Command::Histogram(args) => cmd_histogram(args),
        Command::Rank(args) => cmd_rank(args),
        Command::BuildDataset(args) => cmd_build_dataset(args),
        Command::Balance(args) => cmd_balance(args),
        Command::RankFeatures(args) => cmd_rank_features(args),
        Command::Train(args) => cmd_train(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Pipeline(args) => cmd_pipeline(args),
    }
}

fn outdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path)?;
    Ok(())
}

fn load_graph(path: &Path) -> Result<TemporalGraph> {
    let file = fs::File::open(path)?;
    load_edge_list(BufReader::new(file))
}

fn load_id_file(path: &Path) -> Result<Vec<u64>> {
    let text = fs::read_to_string(path)?;
    let mut ids = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        ids.push(t.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("invalid vertex id {t:?}"),
        })?);
    }
    Ok(ids)
}

fn load_roster(path: Option<&PathBuf>) -> Result<Option<HashSet<VertexId>>> {
    match path {
        None => Ok(None),
        Some(p) => Ok(Some(load_id_file(p)?.into_iter().map(VertexId).collect())),
    }
}

fn parse_variant(text: &str) -> Result<Variant> {
    Variant::parse(text).ok_or_else(|| {
        Error::InvalidArgument(format!("unknown variant {text:?} (nb|logistic|tree)"))
    })
}

fn parse_scoring(text: &str) -> Result<Scoring> {
    match text {
        "authority" => Ok(Scoring::Authority),
        "degree" => Ok(Scoring::DegreeNorm),
        "transitivity" => Ok(Scoring::Transitivity),
        other => {
            if let Some(rest) = other.strip_prefix("weighted:") {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() == 3 {
                    let w: Result<Vec<f64>> = parts
                        .iter()
                        .map(|p| {
                            p.trim().parse().map_err(|_| {
                                Error::InvalidArgument(format!("invalid weight {p:?}"))
                            })
                        })
                        .collect();
                    let w = w?;
                    return Ok(Scoring::Weighted {
                        authority: w[0],
                        degree: w[1],
                        transitivity: w[2],
                    });
                }
            }
            Err(Error::InvalidArgument(format!(
                "unknown scoring {other:?} (authority|degree|transitivity|weighted:<a>,<d>,<t>)"
            )))
        }
    }
}

fn write_output<F>(dir: &Path, name: &str, manifest: &mut RunManifest, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> Result<()>,
{
    let path = dir.join(name);
    let mut w = BufWriter::new(fs::File::create(&path)?);
    body(&mut w)?;
    w.flush()?;
    manifest.output_file(&path)?;
    Ok(())
}

fn snapshot_and_features(
    graph: &TemporalGraph,
    t0: i64,
    hits: &HitsArgs,
) -> Result<(Snapshot, FeatureTable)> {
    let snap = snapshot_at(graph, t0);
    // Leakage guard: feature computation must not mutate the observed
    // topology it reads.
    let digest = snap.structural_digest();
    let feats = compute_global_features(&snap, hits.tol, hits.max_iter)?;
    if snap.structural_digest() != digest {
        return Err(Error::Internal(
            "snapshot changed during feature computation".into(),
        ));
    }
    Ok((snap, feats))
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    outdir(&args.out)?;
    let gen_seed = derive_seed(args.seed, "generation");
    let cfg = GenConfig {
        n: args.n,
        m_per_step: args.m_per_step,
        t0_fraction: args.t0_fraction,
        triangle_prob: args.triangle_prob,
        window_edges: args.window_edges,
        authority_bias: args.authority_bias,
        locality_bias: args.locality_bias,
        noise: args.noise,
        rng_seed: gen_seed,
    };
    let generated = generate(&cfg)?;

    let mut manifest = RunManifest::new("gen");
    manifest
        .parameter("n", args.n)
        .parameter("m_per_step", args.m_per_step)
        .parameter("t0_fraction", args.t0_fraction)
        .parameter("triangle_prob", args.triangle_prob)
        .parameter("window_edges", args.window_edges)
        .parameter("authority_bias", args.authority_bias)
        .parameter("locality_bias", args.locality_bias)
        .parameter("noise", args.noise)
        .parameter("seed", args.seed)
        .seed("root", args.seed)
        .seed("generation", gen_seed)
        .derived("t0", generated.t0)
        .derived("t_end", generated.t_end)
        .derived("planted_edges", generated.planted_edges)
        .derived("organic_window_edges", generated.organic_window_edges)
        .derived("temporal_edges", generated.graph.temporal_edge_count())
        .derived("vertices", generated.graph.vertex_count());
    write_output(&args.out, "edges.txt", &mut manifest, |w| {
        write_edge_list(&generated.graph, w)
    })?;
    manifest.write(&args.out)?;
    println!(
        "generated {} vertices / {} temporal edges; t0={} t_end={}",
        generated.graph.vertex_count(),
        generated.graph.temporal_edge_count(),
        generated.t0,
        generated.t_end
    );
    Ok(())
}

fn cmd_ingest_stats(args: &IngestStatsArgs) -> Result<()> {
    outdir(&args.out)?;
    let graph = load_graph(&args.edges)?;
    let t0 = args.t0.or_else(|| graph.max_timestamp()).unwrap_or(0);
    let snap = snapshot_at(&graph, t0);
    let stats = snap.stats(graph.dropped_self_loops());

    let mut manifest = RunManifest::new("ingest-stats");
    manifest.parameter("t0", t0);
    manifest.input_file(&args.edges)?;
    write_output(&args.out, "stats.json", &mut manifest, |w| {
        Ok(serde_json::to_writer_pretty(w, &stats)?)
    })?;
    manifest.write(&args.out)?;
    println!(
        "n={} m={} max_degree={} dropped_self_loops={}",
        stats.n, stats.m, stats.max_degree, stats.dropped_self_loops
    );
    Ok(())
}

fn cmd_features(args: &FeaturesArgs) -> Result<()> {
    outdir(&args.out)?;
    let graph = load_graph(&args.edges)?;
    let (_, feats) = snapshot_and_features(&graph, args.t0, &args.hits)?;

    let mut manifest = RunManifest::new("features");
    manifest
        .parameter("t0", args.t0)
        .parameter("tol", args.hits.tol)
        .parameter("max_iter", args.hits.max_iter)
        .derived("hits_iterations", feats.hits_iterations)
        .derived("hits_residual", feats.hits_residual);
    manifest.input_file(&args.edges)?;
    write_output(&args.out, "features.csv", &mut manifest, |w| {
        feats.write_csv(w)
    })?;
    manifest.write(&args.out)?;
    Ok(())
}

fn cmd_histogram(args: &HistogramArgs) -> Result<()> {
    outdir(&args.out)?;
    let graph = load_graph(&args.edges)?;
    let (_, feats) = snapshot_and_features(&graph, args.t0, &args.hits)?;
    let transform = if args.log1p {
        ValueTransform::Log1p
    } else {
        ValueTransform::Identity
    };

    let mut manifest = RunManifest::new("histogram");
    manifest
        .parameter("t0", args.t0)
        .parameter("bins", args.bins)
        .parameter("log1p", args.log1p)
        .parameter("step_divisor", args.step_divisor);
    manifest.input_file(&args.edges)?;

    write_output(&args.out, "degree_hist.csv", &mut manifest, |w| {
        writeln!(w, "value,count")?;
        for (value, count) in degree_histogram(&graph) {
            writeln!(w, "{value},{count}")?;
        }
        Ok(())
    })?;
    write_output(&args.out, "links_per_step.csv", &mut manifest, |w| {
        writeln!(w, "value,count")?;
        for (step, count) in links_per_step(&graph, args.step_divisor)? {
            writeln!(w, "{step},{count}")?;
        }
        Ok(())
    })?;
    for (name, column) in [
        ("hist_authority.csv", FeatureColumn::Authority),
        ("hist_degree_norm.csv", FeatureColumn::DegreeNorm),
        ("hist_transitivity.csv", FeatureColumn::Transitivity),
    ] {
        let hist = feature_histogram(&feats, column, args.bins, transform)?;
        write_output(&args.out, name, &mut manifest, |w| {
            writeln!(w, "value,count")?;
            for (lower, count) in &hist {
                writeln!(w, "{lower},{count}")?;
            }
            Ok(())
        })?;
    }
    manifest.write(&args.out)?;
    Ok(())
}

fn cmd_rank(args: &RankArgs) -> Result<()> {
    outdir(&args.out)?;
    let graph = load_graph(&args.edges)?;
    let (snap, feats) = snapshot_and_features(&graph, args.t0, &args.hits)?;

    let mut users: Vec<VertexId> = args.users.iter().copied().map(VertexId).collect();
    if let Some(file) = &args.users_file {
        users.extend(load_id_file(file)?.into_iter().map(VertexId));
    }
    if users.is_empty() {
        users = snap.vertices().collect();
    }

    let cfg = RankerConfig {
        th: args.th,
        k: args.k,
        scoring: parse_scoring(&args.scoring)?,
    };
    let batch = predict_links(&snap, &feats, &users, &cfg)?;
    for (user, err) in &batch.failures {
        log::warn!("user {user} skipped: {err}");
    }

    let mut manifest = RunManifest::new("rank");
    manifest
        .parameter("t0", args.t0)
        .parameter("th", args.th)
        .parameter("k", args.k)
        .parameter("scoring", &args.scoring)
        .parameter("users", users.len())
        .derived("failed_users", batch.failures.len());
    manifest.input_file(&args.edges)?;
    write_output(&args.out, "candidates.csv", &mut manifest, |w| {
        writeln!(w, "user,rank,candidate,score,via_seed_count")?;
        for user in &batch.results {
            for (rank, c) in user.candidates.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    user.user,
                    rank + 1,
                    c.vertex,
                    c.score,
                    c.via_seed_count
                )?;
            }
        }
        Ok(())
    })?;
    manifest.write(&args.out)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn build_dataset_for_mode(
    mode: &str,
    snap: &Snapshot,
    window: &ObservationWindow,
    feats: &FeatureTable,
    th: f64,
    neg_cap: usize,
    seed: u64,
    roster: Option<&HashSet<VertexId>>,
) -> Result<Dataset> {
    let ds = match mode {
        "classification" => build_classification_with_roster(
            snap,
            window,
            feats,
            neg_cap,
            derive_seed(seed, "negative-sampling"),
            roster,
        )?,
        "threshold" => build_threshold_with_roster(
            snap,
            window,
            feats,
            th,
            derive_seed(seed, "negative-sampling"),
            roster,
        )?,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown mode {other:?} (classification|threshold)"
            )))
        }
    };
    verify_dataset(&ds, snap, window)?;
    Ok(ds)
}

fn cmd_build_dataset(args: &BuildDatasetArgs) -> Result<()> {
    outdir(&args.out)?;
    let graph = load_graph(&args.edges)?;
    let (snap, feats) = snapshot_and_features(&graph, args.t0, &args.hits)?;
    let window = window_edges(&graph, &snap, args.t0, args.t_end)?;
    let roster = load_roster(args.roster.as_ref())?;

    let ds = build_dataset_for_mode(
        &args.mode,
        &snap,
        &window,
        &feats,
        args.th,
        args.neg_cap,
        args.seed,
        roster.as_ref(),
    )?;
    let (real, false_) = ds.class_counts();

    let mut manifest = RunManifest::new("build-dataset");
    manifest
        .parameter("t0", args.t0)
        .parameter("t_end", args.t_end)
        .parameter("mode", &args.mode)
        .parameter("th", args.th)
        .parameter("neg_cap", args.neg_cap)
        .parameter("seed", args.seed)
        .seed("root", args.seed)
        .seed(
            "negative-sampling",
            derive_seed(args.seed, "negative-sampling"),
        )
        .derived("real_instances", real)
        .derived("false_instances", false_);
    manifest.input_file(&args.edges)?;
    write_output(&args.out, "dataset.csv", &mut manifest, |w| {
        write_dataset(&ds, w)
    })?;
    manifest.write(&args.out)?;
    println!("dataset: {real} real / {false_} false instances");
    Ok(())
}

fn read_dataset_file(path: &Path) -> Result<Dataset> {
    let file = fs::File::open(path)?;
    read_dataset(BufReader::new(file))
}

fn cmd_balance(args: &BalanceArgs) -> Result<()> {
    outdir(&args.out)?;
    let ds = read_dataset_file(&args.dataset)?;
    let balanced = balance(&ds, derive_seed(args.seed, "balancing"))?;
    let (real, false_) = balanced.class_counts();

    let mut manifest = RunManifest::new("balance");
    manifest
        .parameter("seed", args.seed)
        .seed("root", args.seed)
        .seed("balancing", derive_seed(args.seed, "balancing"))
        .derived("real_instances", real)
        .derived("false_instances", false_);
    manifest.input_file(&args.dataset)?;
    write_output(&args.out, "balanced.csv", &mut manifest, |w| {
        write_dataset(&balanced, w)
    })?;
    manifest.write(&args.out)?;
    Ok(())
}

fn cmd_rank_features(args: &RankFeaturesArgs) -> Result<()> {
    outdir(&args.out)?;
    let ds = read_dataset_file(&args.dataset)?;
    let ranked = rank_features(&ds, args.bins)?;

    let mut manifest = RunManifest::new("rank-features");
    manifest.parameter("bins", args.bins);
    manifest.input_file(&args.dataset)?;
    write_output(&args.out, "info_gain.csv", &mut manifest, |w| {
        writeln!(w, "feature,info_gain")?;
        for (name, gain) in &ranked {
            writeln!(w, "{name},{gain}")?;
        }
        Ok(())
    })?;
    manifest.write(&args.out)?;
    Ok(())
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    outdir(&args.out)?;
    let ds = read_dataset_file(&args.dataset)?;
    let variant = parse_variant(&args.variant)?;
    let cfg = args.learner.train_config(args.seed);
    let model = train(&ds, &cfg, variant)?;

    let mut manifest = RunManifest::new("train");
    manifest
        .parameter("variant", &args.variant)
        .parameter("seed", args.seed)
        .seed("root", args.seed);
    manifest.input_file(&args.dataset)?;
    write_output(&args.out, "model.json", &mut manifest, |w| {
        model.save_json(w)
    })?;
    manifest.write(&args.out)?;
    Ok(())
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    outdir(&args.out)?;
    let ds = read_dataset_file(&args.dataset)?;
    let variant = parse_variant(&args.variant)?;
    let cfg = args.learner.train_config(args.seed);
    let folds_seed = derive_seed(args.seed, "folds");
    let report = cross_validate(&ds, &cfg, variant, args.folds, folds_seed)?;

    let mut manifest = RunManifest::new("evaluate");
    manifest
        .parameter("variant", &args.variant)
        .parameter("folds", args.folds)
        .parameter("seed", args.seed)
        .seed("root", args.seed)
        .seed("folds", folds_seed)
        .derived("weighted_f_measure", report.weighted_f_measure());
    manifest.input_file(&args.dataset)?;
    write_output(&args.out, "report.csv", &mut manifest, |w| {
        report.write_csv(w)
    })?;
    if variant == Variant::Tree {
        let effect = tree_pruning_effect(&ds, &cfg, args.folds, folds_seed)?;
        write_output(&args.out, "pruning_effect.json", &mut manifest, |w| {
            Ok(serde_json::to_writer_pretty(w, &effect)?)
        })?;
        println!(
            "pruning: weighted F {:.4} (pruned) vs {:.4} (unpruned), delta {:+.4}",
            effect.weighted_f_pruned, effect.weighted_f_unpruned, effect.f_delta
        );
    }
    manifest.write(&args.out)?;
    println!(
        "{} weighted F-measure: {:.4}",
        variant.as_str(),
        report.weighted_f_measure()
    );
    Ok(())
}

fn cmd_pipeline(args: &PipelineArgs) -> Result<()> {
    outdir(&args.out)?;
    let graph = load_graph(&args.edges)?;
    let (snap, feats) = snapshot_and_features(&graph, args.t0, &args.hits)?;
    let window = window_edges(&graph, &snap, args.t0, args.t_end)?;
    let roster = load_roster(args.roster.as_ref())?;

    let variants: Vec<Variant> = if args.variants.is_empty() {
        vec![Variant::GaussianNb, Variant::Logistic, Variant::Tree]
    } else {
        args.variants
            .iter()
            .map(|v| parse_variant(v))
            .collect::<Result<_>>()?
    };
    let cfg = args.learner.train_config(args.seed);

    let mut manifest = RunManifest::new("pipeline");
    manifest
        .parameter("t0", args.t0)
        .parameter("t_end", args.t_end)
        .parameter("mode", &args.mode)
        .parameter("neg_cap", args.neg_cap)
        .parameter("bins", args.bins)
        .parameter("folds", args.folds)
        .parameter("seed", args.seed)
        .parameter(
            "variants",
            variants
                .iter()
                .map(|v| v.as_str())
                .collect::<Vec<_>>()
                .join(","),
        )
        .seed("root", args.seed);
    manifest.input_file(&args.edges)?;

    let mut summary = serde_json::Map::new();
    summary.insert("mode".into(), args.mode.clone().into());
    summary.insert("t0".into(), args.t0.into());
    summary.insert("t_end".into(), args.t_end.into());
    summary.insert(
        "window_new_edges".into(),
        (window.new_edge_count() as u64).into(),
    );

    match args.mode.as_str() {
        "classification" => {
            let stage = run_pipeline_stage(
                &snap,
                &window,
                &feats,
                &args.mode,
                0.0,
                args,
                &variants,
                &cfg,
                roster.as_ref(),
                "",
                &mut manifest,
            )?;
            summary.insert("result".into(), stage);
        }
        "threshold" => {
            let thresholds = if args.th.is_empty() {
                vec![0.1, 0.2, 0.3]
            } else {
                args.th.clone()
            };
            manifest.parameter(
                "th",
                thresholds
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            let mut per_th = Vec::new();
            for &th in &thresholds {
                let suffix = format!("_th{th}");
                let mut stage = run_pipeline_stage(
                    &snap,
                    &window,
                    &feats,
                    &args.mode,
                    th,
                    args,
                    &variants,
                    &cfg,
                    roster.as_ref(),
                    &suffix,
                    &mut manifest,
                )?;
                if let Some(obj) = stage.as_object_mut() {
                    obj.insert("th".into(), th.into());
                }
                per_th.push(stage);
            }
            summary.insert("thresholds".into(), per_th.into());
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown mode {other:?} (classification|threshold)"
            )))
        }
    }

    write_output(&args.out, "summary.json", &mut manifest, |w| {
        Ok(serde_json::to_writer_pretty(
            w,
            &serde_json::Value::Object(summary),
        )?)
    })?;
    manifest.write(&args.out)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_pipeline_stage(
    snap: &Snapshot,
    window: &ObservationWindow,
    feats: &FeatureTable,
    mode: &str,
    th: f64,
    args: &PipelineArgs,
    variants: &[Variant],
    cfg: &TrainConfig,
    roster: Option<&HashSet<VertexId>>,
    suffix: &str,
    manifest: &mut RunManifest,
) -> Result<serde_json::Value> {
    let ds = build_dataset_for_mode(
        mode,
        snap,
        window,
        feats,
        th,
        args.neg_cap,
        args.seed,
        roster,
    )?;
    let (real, false_) = ds.class_counts();
    write_output(&args.out, &format!("dataset{suffix}.csv"), manifest, |w| {
        write_dataset(&ds, w)
    })?;

    let balance_seed = derive_seed(args.seed, &format!("balancing{suffix}"));
    let balanced = balance(&ds, balance_seed)?;
    let (breal, bfalse) = balanced.class_counts();
    manifest.seed(&format!("balancing{suffix}"), balance_seed);
    write_output(&args.out, &format!("balanced{suffix}.csv"), manifest, |w| {
        write_dataset(&balanced, w)
    })?;

    let ranked = rank_features(&balanced, args.bins)?;
    write_output(
        &args.out,
        &format!("info_gain{suffix}.csv"),
        manifest,
        |w| {
            writeln!(w, "feature,info_gain")?;
            for (name, gain) in &ranked {
                writeln!(w, "{name},{gain}")?;
            }
            Ok(())
        },
    )?;

    let folds_seed = derive_seed(args.seed, &format!("folds{suffix}"));
    manifest.seed(&format!("folds{suffix}"), folds_seed);
    let mut reports = serde_json::Map::new();
    for &variant in variants {
        let report = cross_validate(&balanced, cfg, variant, args.folds, folds_seed)?;
        write_output(
            &args.out,
            &format!("report{suffix}_{}.csv", variant.as_str()),
            manifest,
            |w| report.write_csv(w),
        )?;
        let mut entry = serde_json::Map::new();
        entry.insert(
            "weighted_f_measure".into(),
            report.weighted_f_measure().into(),
        );
        entry.insert("roc_area".into(), report.weighted_avg.roc_area.into());
        entry.insert("mcc".into(), report.weighted_avg.mcc.into());
        if variant == Variant::Tree {
            let effect = tree_pruning_effect(&balanced, cfg, args.folds, folds_seed)?;
            entry.insert("pruning_f_delta".into(), effect.f_delta.into());
            entry.insert("nodes_pruned".into(), (effect.nodes_pruned as u64).into());
            entry.insert(
                "nodes_unpruned".into(),
                (effect.nodes_unpruned as u64).into(),
            );
        }
        reports.insert(variant.as_str().into(), entry.into());
        println!(
            "{}{}: weighted F {:.4}",
            variant.as_str(),
            suffix,
            report.weighted_f_measure()
        );
    }

    // Retrieval totals for the precision/recall tradeoff analysis.
    let (seed_total, candidate_total) = if mode == "threshold" {
        retrieval_totals(snap, window, th, roster)
    } else {
        (0, 0)
    };

    let mut stage = serde_json::Map::new();
    stage.insert("dataset_real".into(), (real as u64).into());
    stage.insert("dataset_false".into(), (false_ as u64).into());
    stage.insert("balanced_real".into(), (breal as u64).into());
    stage.insert("balanced_false".into(), (bfalse as u64).into());
    stage.insert(
        "info_gain".into(),
        ranked
            .iter()
            .map(|(n, g)| serde_json::json!([n, g]))
            .collect::<Vec<_>>()
            .into(),
    );
    stage.insert("reports".into(), reports.into());
    if mode == "threshold" {
        stage.insert("seed_count".into(), seed_total.into());
        stage.insert("candidate_count".into(), candidate_total.into());
    }
    Ok(stage.into())
}

/// Total seeds and candidates over the active users at one threshold.
fn retrieval_totals(
    snap: &Snapshot,
    window: &ObservationWindow,
    th: f64,
    roster: Option<&HashSet<VertexId>>,
) -> (u64, u64) {
    let active = crate::dataset::active_users(snap, window, roster);
    let mut seeds_total = 0u64;
    let mut candidates_total = 0u64;
    for user in active {
        let ui = snap.internal(user).expect("active user in snapshot");
        let seeds = crate::ranker::retrieve_seeds_internal(snap, ui, th);
        seeds_total += seeds.len() as u64;
        candidates_total +=
            crate::ranker::collect_candidates_internal(snap, ui, &seeds).len() as u64;
    }
    (seeds_total, candidates_total)
}
