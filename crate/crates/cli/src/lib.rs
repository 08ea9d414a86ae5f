//! The `lpm-group` command line: load a ranked model set from a manifest,
//! compute distances, cluster, pick representatives and report.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use lpm_group::analysis::{
    diversity_report, group, map_ranks, reduction_curve, Grouping, DEFAULT_DIVERSITY_NS, DEFAULT_REDUCTION_NS,
};
use lpm_group::clustering::{RankedModelSet, RepresentativeStrategy, SweepResult};
use lpm_group::exec::Execution;
use lpm_group::io::{
    clusters_csv, diversity_csv, export_matrix, load_manifest, read_matrix, reduction_csv, to_dot, write_file,
    LoadedManifest,
};
use lpm_group::petri::{DEFAULT_BOUND, DEFAULT_EXPLORATION_CAP};
use lpm_group::similarity::{
    distance_matrix, DistanceMatrix, MeasureId, SimilarityConfig, DEFAULT_GED_BUDGET, DEFAULT_LANGUAGE_CAP,
};

#[derive(Debug, Parser)]
#[command(name = "lpm-group", version, about = "Group local process models by similarity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that every model in the manifest is a valid local process model.
    Validate(Common),
    /// Compute the pairwise distance matrix.
    Matrix(Common),
    /// Sweep thresholds, cluster, and pick one representative per cluster.
    Cluster(Common),
    /// Reduction curve and diversity comparison of the representatives.
    Diversity(DiversityArgs),
    /// Write one Graphviz file per model.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Manifest JSON listing model files and ranks.
    #[arg(long)]
    manifest: PathBuf,
    /// transition, node, efg, full or ged.
    #[arg(long)]
    measure: Option<String>,
    /// Maximal firing-sequence length for efg and full.
    #[arg(long)]
    bound: Option<usize>,
    /// Threshold range `lo:hi:step`.
    #[arg(long, default_value = "0.1:1.0:0.1", value_parser = parse_thresholds)]
    thresholds: Thresholds,
    /// Representative strategy: rank or dist.
    #[arg(long = "repr", default_value = "dist")]
    repr: RepresentativeStrategy,
    /// Traces kept per language by the full measure.
    #[arg(long, default_value_t = DEFAULT_LANGUAGE_CAP)]
    lang_cap: usize,
    /// Search nodes per graph-edit-distance pair.
    #[arg(long, default_value_t = DEFAULT_GED_BUDGET)]
    ged_budget: usize,
    /// Search nodes per language enumeration.
    #[arg(long, default_value_t = DEFAULT_EXPLORATION_CAP)]
    exploration_cap: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Exit with status 2 when a result is degenerate.
    #[arg(long)]
    strict: bool,
    /// Drop invalid models instead of aborting.
    #[arg(long)]
    skip_invalid: bool,
    /// Reuse a matrix CSV written by the `matrix` command.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiversityArgs {
    #[command(flatten)]
    common: Common,
    /// Top-n sizes for the reduction curve.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_REDUCTION_NS)]
    reduction_ns: Vec<usize>,
    /// Top-n sizes for the diversity comparison.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_DIVERSITY_NS)]
    diversity_ns: Vec<usize>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Only this model.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    skip_invalid: bool,
}

#[derive(Debug, Clone, PartialEq)]
struct Thresholds(Vec<f64>);

/// `lo:hi:step`, inclusive, values rounded to nine decimals so that
/// `0.1:1.0:0.1` yields exactly 0.1, 0.2, ….
fn parse_thresholds(s: &str) -> Result<Thresholds, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(format!("expected lo:hi:step, got `{s}`"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("invalid number `{x}`"));
    let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(format!("thresholds must satisfy 0 <= lo <= hi <= 1, got `{s}`"));
    }
    if step.is_nan() || step <= 0.0 {
        return Err("step must be positive".to_string());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    let values = (0..=count)
        .map(|k| ((lo + k as f64 * step) * 1e9).round() / 1e9)
        .collect();
    Ok(Thresholds(values))
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Degenerate(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(msg) => write!(f, "error: {msg}"),
            Failure::Degenerate(msg) => write!(f, "error: degenerate result under --strict: {msg}"),
        }
    }
}

fn input<E: fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

/// Runs the command line and returns the process exit status: 0 on
/// success, 1 on input errors, 2 for degenerate results under `--strict`.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{f}");
            match f {
                Failure::Input(_) => 1,
                Failure::Degenerate(_) => 2,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate(c) => validate(&c),
        Command::Matrix(c) => with_pool(c.threads, || matrix_cmd(&c)),
        Command::Cluster(c) => with_pool(c.threads, || cluster_cmd(&c)),
        Command::Diversity(d) => with_pool(d.common.threads, || diversity_cmd(&d)),
        Command::Render(r) => render(&r),
    }
}

fn with_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

fn load(path: &Path, skip_invalid: bool) -> Result<LoadedManifest, Failure> {
    let loaded = load_manifest(path, skip_invalid).map_err(input)?;
    for invalid in &loaded.skipped {
        eprintln!("warning: skipped {invalid}");
    }
    Ok(loaded)
}

fn resolve_measure(c: &Common, loaded: &LoadedManifest) -> Result<MeasureId, Failure> {
    let name = c
        .measure
        .as_deref()
        .or(loaded.manifest.measure.as_deref())
        .unwrap_or("transition");
    let bound = c.bound.or(loaded.manifest.bound).unwrap_or(DEFAULT_BOUND);
    if bound == 0 {
        return Err(Failure::Input("--bound must be positive".into()));
    }
    let measure = if name.contains(':') {
        name.parse::<MeasureId>().map_err(input)?
    } else {
        MeasureId::from_name(name, bound).map_err(input)?
    };
    if c.bound.is_some() && measure.bound().is_none() {
        eprintln!("notice: --bound is ignored by the {measure} measure");
    }
    Ok(measure)
}

fn config(c: &Common) -> SimilarityConfig {
    SimilarityConfig {
        exploration_cap: c.exploration_cap,
        language_cap: c.lang_cap,
        ged_budget: c.ged_budget,
    }
}

/// The matrix the clustering runs on: cached, or computed and quantized to
/// the precision of the CSV export so both routes agree exactly.
fn obtain_matrix(c: &Common, loaded: &LoadedManifest) -> Result<DistanceMatrix, Failure> {
    let ranked = &loaded.ranked;
    match &c.matrix {
        Some(path) => {
            let cached = read_matrix(path).map_err(input)?;
            if c.measure.is_some() || c.bound.is_some() {
                let wanted = resolve_measure(c, loaded)?;
                if wanted != cached.measure() {
                    return Err(Failure::Input(format!(
                        "cached matrix was computed with {}, not {wanted}",
                        cached.measure()
                    )));
                }
            }
            let ids: Vec<&str> = ranked.models().iter().map(|m| m.id()).collect();
            cached.restrict_ids(&ids).map_err(input)
        }
        None => Ok(compute_matrix(c, loaded)?.quantized()),
    }
}

fn compute_matrix(c: &Common, loaded: &LoadedManifest) -> Result<DistanceMatrix, Failure> {
    let measure = resolve_measure(c, loaded)?;
    let matrix = distance_matrix(loaded.ranked.models(), measure, &config(c), Execution::Parallel).map_err(input)?;
    let approx = matrix.approximate_pairs().len();
    if approx > 0 {
        eprintln!("notice: {approx} pair(s) are approximate");
    }
    Ok(matrix)
}

fn validate(c: &Common) -> Result<(), Failure> {
    let loaded = load_manifest(&c.manifest, true).map_err(input)?;
    for invalid in &loaded.skipped {
        println!("invalid: {invalid}");
    }
    println!("{} valid, {} invalid", loaded.ranked.len(), loaded.skipped.len());
    if !loaded.skipped.is_empty() && !c.skip_invalid {
        return Err(Failure::Input(format!("{} invalid model(s)", loaded.skipped.len())));
    }
    Ok(())
}

fn matrix_cmd(c: &Common) -> Result<(), Failure> {
    let loaded = load(&c.manifest, c.skip_invalid)?;
    let matrix = compute_matrix(c, &loaded)?;
    let path = c.out.join("matrix.csv");
    export_matrix(&matrix, &path).map_err(input)?;
    println!("{} x {} {} matrix written to {}", matrix.len(), matrix.len(), matrix.measure(), path.display());
    Ok(())
}

fn sweep_json(result: &SweepResult) -> Value {
    let points: Vec<Value> = result
        .points
        .iter()
        .map(|p| {
            json!({
                "threshold": p.threshold,
                "clusters": p.clusters.len(),
                "silhouette": p.silhouette,
            })
        })
        .collect();
    let selected = result.selected();
    json!({
        "points": points,
        "selected": {
            "threshold": selected.threshold,
            "clusters": selected.clusters.len(),
            "silhouette": selected.silhouette,
            "degenerate": result.is_degenerate(),
        },
    })
}

fn grouping_json(grouping: &Grouping, ranked: &RankedModelSet, strategy: RepresentativeStrategy) -> Result<Value, Failure> {
    let ids = grouping.representative_ids();
    let mut reps: Vec<(u32, &str)> = ids.iter().map(|&id| (ranked.rank(id).unwrap_or(0), id)).collect();
    reps.sort_unstable();
    Ok(json!({
        "strategy": strategy.name(),
        "sweep": sweep_json(&grouping.sweep),
        "representatives": reps.iter().map(|&(rank, id)| json!({"id": id, "rank": rank})).collect::<Vec<_>>(),
        "representative_ranks": map_ranks(&ids, ranked).map_err(input)?,
    }))
}

fn degenerate_check(c: &Common, grouping: &Grouping) -> Result<(), Failure> {
    if grouping.is_degenerate() {
        let msg = format!(
            "every threshold gave a degenerate clustering; reporting {} cluster(s) at threshold {}",
            grouping.sweep.selected().clusters.len(),
            grouping.sweep.selected().threshold
        );
        eprintln!("warning: {msg}");
        if c.strict {
            return Err(Failure::Degenerate(msg));
        }
    }
    Ok(())
}

fn write_json(path: &Path, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    write_file(path, &text).map_err(input)
}

fn cluster_cmd(c: &Common) -> Result<(), Failure> {
    let loaded = load(&c.manifest, c.skip_invalid)?;
    let ranked = &loaded.ranked;
    let matrix = obtain_matrix(c, &loaded)?;
    let grouping = group(ranked, &matrix, &c.thresholds.0, c.repr).map_err(input)?;
    let selected = grouping.sweep.selected();

    write_file(
        &c.out.join("clusters.csv"),
        &clusters_csv(&selected.clusters, &grouping.representatives, ranked, &grouping.matrix),
    )
    .map_err(input)?;
    let mut report = grouping_json(&grouping, ranked, c.repr)?;
    report["measure"] = json!(matrix.measure().to_string());
    report["models"] = json!(ranked.len());
    write_json(&c.out.join("report.json"), &report)?;

    println!(
        "{} models -> {} clusters (threshold {}, silhouette {})",
        ranked.len(),
        selected.clusters.len(),
        selected.threshold,
        selected.silhouette.map_or("undefined".to_string(), |s| format!("{s:.6}"))
    );
    degenerate_check(c, &grouping)
}

fn diversity_cmd(d: &DiversityArgs) -> Result<(), Failure> {
    let c = &d.common;
    let loaded = load(&c.manifest, c.skip_invalid)?;
    let ranked = &loaded.ranked;
    let matrix = obtain_matrix(c, &loaded)?;
    let grouping = group(ranked, &matrix, &c.thresholds.0, c.repr).map_err(input)?;
    let repr_set = grouping.representative_set(ranked).map_err(input)?;

    let curve =
        reduction_curve(ranked, &grouping.matrix, &c.thresholds.0, &d.reduction_ns, Execution::Parallel).map_err(input)?;
    let diversity = diversity_report(ranked, &repr_set, &grouping.matrix, &d.diversity_ns).map_err(input)?;

    write_file(&c.out.join("reduction.csv"), &reduction_csv(&curve)).map_err(input)?;
    write_file(&c.out.join("diversity.csv"), &diversity_csv(&diversity)).map_err(input)?;

    let mut report = grouping_json(&grouping, ranked, c.repr)?;
    report["measure"] = json!(matrix.measure().to_string());
    report["models"] = json!(ranked.len());
    report["reduction"] = Value::Array(
        curve
            .points
            .iter()
            .map(|p| {
                json!({
                    "n": p.n,
                    "size": p.size,
                    "representative_count": p.representative_count,
                    "threshold": p.threshold,
                    "silhouette": p.silhouette,
                    "degenerate": p.degenerate,
                })
            })
            .collect(),
    );
    report["diversity"] = Value::Array(
        diversity
            .points
            .iter()
            .map(|p| {
                json!({
                    "n": p.n,
                    "original_size": p.original_size,
                    "representative_size": p.representative_size,
                    "original_mean": p.original_mean,
                    "representative_mean": p.representative_mean,
                    "clamped": p.clamped,
                })
            })
            .collect(),
    );
    write_json(&c.out.join("report.json"), &report)?;

    for p in &diversity.points {
        let show = |v: Option<f64>| v.map_or("undefined".to_string(), |v| format!("{v:.6}"));
        println!(
            "top-{}: original {} vs representatives {}",
            p.n,
            show(p.original_mean),
            show(p.representative_mean)
        );
    }
    degenerate_check(c, &grouping)
}

fn render(r: &RenderArgs) -> Result<(), Failure> {
    let loaded = load(&r.manifest, r.skip_invalid)?;
    let models: Vec<_> = match &r.model {
        Some(id) => vec![loaded
            .ranked
            .model(id)
            .ok_or_else(|| Failure::Input(format!("no model `{id}` in manifest")))?],
        None => loaded.ranked.models().iter().collect(),
    };
    for m in &models {
        write_file(&r.out.join(format!("{}.dot", m.id())), &to_dot(m)).map_err(input)?;
    }
    println!("{} DOT file(s) written to {}", models.len(), r.out.display());
    Ok(())
}
