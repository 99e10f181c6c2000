use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kacd::alignment::{pseudo_correlation_with, AlignmentOptions};
use kacd::bench::{
    preset, run_experiment, scores_to_csv, summarize, summary_to_csv, timings_to_csv, Experiment,
    ExperimentSpec, ParamPreset,
};
use kacd::discovery::{kapc_with, kafci_with, Algorithm, SearchConfig};
use kacd::graphs::MixedGraph;
use kacd::kernels::{Dataset, KernelParams};
use kacd::metrics::shd;
use kacd::simdata::{generate_grid, manifest_from_csv, GridSpec, TypeGroup};
use kacd::{Error, Result};

/// Seed used when --seed is absent, so default runs are reproducible.
const DEFAULT_SEED: u64 = 17;

#[derive(Parser)]
#[command(
    name = "kacd",
    version,
    about = "Causal discovery on mixed-type data via kernel-alignment pseudo-correlation",
    args_override_self = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic mixed-type datasets from random DAGs
    Simulate(SimulateArgs),
    /// Learn a CPDAG (pc) or PAG (fci) from a dataset CSV
    Learn(LearnArgs),
    /// Structural Hamming distance between two graph files
    Score(ScoreArgs),
    /// Run an experiment grid and emit scores.csv / timings.csv / summary.csv
    Bench(BenchArgs),
    /// Print the pseudo-correlation matrix of a dataset as CSV
    Corr(CorrArgs),
}

#[derive(Args)]
struct CommonOpts {
    /// Flat `key = value` file supplying any flag; command line wins
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// RNG seed (fixed default keeps runs reproducible)
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Output directory (created if missing)
    #[arg(long, short, default_value = "simdata")]
    out: PathBuf,
    /// Graph sizes, repeatable
    #[arg(long, num_args = 1.., default_values_t = vec![10usize])]
    nodes: Vec<usize>,
    /// Graphs per size
    #[arg(long, default_value_t = 1)]
    graphs: usize,
    /// Datasets per graph
    #[arg(long, default_value_t = 1)]
    datasets: usize,
    /// Sample sizes, repeatable
    #[arg(long, num_args = 1.., default_values_t = vec![1000usize])]
    samples: Vec<usize>,
    /// Variable-type group: 1 = binary/ordinal/continuous, 2 = + categorical
    #[arg(long, default_value_t = 2)]
    group: u8,
    /// Expected node degree of the random DAGs
    #[arg(long, default_value_t = 2.0)]
    degree: f64,
    /// Also pick latent variables per (graph, dataset) cell
    #[arg(long)]
    latents: bool,
    #[arg(long, default_value_t = 4)]
    ordinal_levels: usize,
    #[arg(long, default_value_t = 3)]
    categorical_levels: usize,
}

#[derive(Copy, Clone, ValueEnum)]
enum AlgorithmArg {
    Pc,
    Fci,
}

#[derive(Args)]
struct KernelOpts {
    /// Parameter preset P1..P9 (overrides --sigma/--theta)
    #[arg(long)]
    preset: Option<String>,
    /// RBF kernel width for continuous columns
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Categorical kernel exponent
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Skip Gram-matrix centering
    #[arg(long)]
    no_centering: bool,
    /// Standardize continuous columns before kernel construction
    #[arg(long)]
    zscore: bool,
}

impl KernelOpts {
    fn params(&self) -> Result<KernelParams> {
        let (sigma, theta) = match &self.preset {
            Some(id) => {
                let p = preset(id)?;
                (p.sigma, p.theta)
            }
            None => (self.sigma, self.theta),
        };
        KernelParams::new(sigma, theta)
    }

    fn alignment_options(&self, jobs: Option<usize>) -> AlignmentOptions {
        let mut opts = AlignmentOptions::default();
        opts.centering = !self.no_centering;
        if jobs == Some(1) {
            opts.parallel = false;
        }
        opts
    }
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Dataset CSV (expects a .schema sidecar)
    data: PathBuf,
    #[arg(long, short, value_enum, default_value_t = AlgorithmArg::Pc)]
    algorithm: AlgorithmArg,
    #[command(flatten)]
    kernel: KernelOpts,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Output graph file (default: dataset path with .graph extension)
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Also write the pseudo-correlation matrix next to the output
    #[arg(long)]
    dump_corr: bool,
    /// Classic order-dependent skeleton instead of the stable variant
    #[arg(long)]
    classic_skeleton: bool,
    /// Cap on conditioning-set size
    #[arg(long)]
    max_cond: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Ground-truth graph file
    truth: PathBuf,
    /// Learned graph file
    learned: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Experiment number: 1 (Group1, PC), 2 (Group2, PC), 3 (Group2, FCI + latents)
    #[arg(long, short, default_value_t = 2)]
    experiment: u8,
    /// Shrunk grid: p = 10, 3 graphs x 2 datasets, n <= 2000 (default)
    #[arg(long, conflicts_with = "full")]
    desk_scale: bool,
    /// Full grid: p in {10,20,30}, 10 graphs x 5 datasets, n <= 5000
    #[arg(long)]
    full: bool,
    /// Output directory for grid data and result CSVs
    #[arg(long, short, default_value = "bench_out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Preset subset, e.g. --presets P1 P9 (default: all nine)
    #[arg(long, num_args = 1..)]
    presets: Option<Vec<String>>,
    /// Regenerate grid data even if a manifest already exists
    #[arg(long)]
    fresh: bool,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct CorrArgs {
    #[command(flatten)]
    common: CommonOpts,
    data: PathBuf,
    #[command(flatten)]
    kernel: KernelOpts,
    /// Write CSV here instead of standard output
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = parse_with_config();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Learn(a) => cmd_learn(a),
        Command::Score(a) => cmd_score(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Corr(a) => cmd_corr(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Two-phase parse: find --config, splice its `key = value` pairs in as
/// flags right after the subcommand, re-parse so explicit flags win.
fn parse_with_config() -> Cli {
    let argv: Vec<String> = std::env::args().collect();
    let config_path = argv
        .iter()
        .position(|a| a == "--config")
        .and_then(|i| argv.get(i + 1))
        .cloned();
    let Some(path) = config_path else {
        return Cli::parse();
    };
    match config_tokens(Path::new(&path)) {
        Ok(tokens) => {
            let mut merged: Vec<String> = argv[..2.min(argv.len())].to_vec();
            merged.extend(tokens);
            merged.extend(argv.iter().skip(2).cloned());
            Cli::parse_from(merged)
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn config_tokens(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut tokens = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Input(format!(
                "{}:{}: expected `key = value`, got '{line}'",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match value {
            "true" => tokens.push(format!("--{key}")),
            "false" => {}
            _ => {
                tokens.push(format!("--{key}"));
                for part in value.split_whitespace() {
                    tokens.push(part.to_string());
                }
            }
        }
    }
    Ok(tokens)
}

fn init_thread_pool(jobs: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}

fn cmd_simulate(a: SimulateArgs) -> Result<ExitCode> {
    let spec = GridSpec {
        node_sizes: a.nodes,
        expected_degree: a.degree,
        group: TypeGroup::from_id(a.group)?,
        graphs_per_size: a.graphs,
        datasets_per_graph: a.datasets,
        sample_sizes: a.samples,
        seed: a.common.seed,
        ordinal_levels: a.ordinal_levels,
        categorical_levels: a.categorical_levels,
        with_latents: a.latents,
        ..Default::default()
    };
    let entries = generate_grid(&spec, &a.out)?;
    let datasets = entries.iter().filter(|e| e.kind == "dataset").count();
    let dags = entries.iter().filter(|e| e.kind == "dag").count();
    println!(
        "wrote {dags} DAGs, {datasets} datasets and manifest.csv to {}",
        a.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn load_dataset(path: &Path, zscore: bool) -> Result<Dataset> {
    let mut ds = Dataset::read_csv(path)?;
    if ds.n_cols() < 2 {
        return Err(Error::Input("dataset needs at least two columns".into()));
    }
    if zscore {
        ds.zscore_continuous();
    }
    Ok(ds)
}

fn cmd_learn(a: LearnArgs) -> Result<ExitCode> {
    init_thread_pool(a.jobs);
    let params = a.kernel.params()?;
    let ds = load_dataset(&a.data, a.kernel.zscore)?;
    let opts = a.kernel.alignment_options(a.jobs);
    let cfg = SearchConfig {
        alpha: a.alpha,
        max_cond_size: a.max_cond,
        stable_skeleton: !a.classic_skeleton,
        algorithm: match a.algorithm {
            AlgorithmArg::Pc => Algorithm::Pc,
            AlgorithmArg::Fci => Algorithm::Fci,
        },
        verbose: a.common.verbose,
    };
    let out = a.out.unwrap_or_else(|| a.data.with_extension("graph"));

    if a.dump_corr {
        let pseudo = pseudo_correlation_with(&ds, &params, &opts)?;
        let corr_path = out.with_extension("corr.csv");
        std::fs::write(&corr_path, pseudo.to_csv()).map_err(|e| Error::io(&corr_path, e))?;
        println!("wrote {}", corr_path.display());
    }

    let graph = match a.algorithm {
        AlgorithmArg::Pc => kapc_with(&ds, &params, &cfg, &opts)?,
        AlgorithmArg::Fci => kafci_with(&ds, &params, &cfg, &opts)?,
    };
    graph.write_file(&out)?;
    println!(
        "wrote {} ({} nodes, {} edges)",
        out.display(),
        graph.node_count(),
        graph.edge_count()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_score(a: ScoreArgs) -> Result<ExitCode> {
    let mut truth = MixedGraph::read_file(&a.truth)?;
    let learned = MixedGraph::read_file(&a.learned)?;
    // scoring a CPDAG against a DAG ground truth means its equivalence class
    if truth.kind() == kacd::graphs::GraphKind::Dag
        && learned.kind() == kacd::graphs::GraphKind::Cpdag
    {
        truth = kacd::graphs::dag_to_cpdag(&truth)?;
    }
    let r = shd(&truth, &learned)?;
    println!("extra,missing,wrong_mark,shd,normalized");
    println!(
        "{},{},{},{},{:.6}",
        r.extra, r.missing, r.wrong_mark, r.shd, r.normalized
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(a: BenchArgs) -> Result<ExitCode> {
    init_thread_pool(a.jobs);
    let experiment = Experiment::from_number(a.experiment)?;
    let mut spec = if a.full {
        ExperimentSpec::full_scale(experiment, a.common.seed)
    } else {
        ExperimentSpec::desk_scale(experiment, a.common.seed)
    };
    spec.alpha = a.alpha;
    if let Some(ids) = &a.presets {
        spec.presets = ids
            .iter()
            .map(|id| preset(id))
            .collect::<Result<Vec<ParamPreset>>>()?;
    }

    let manifest_path = a.out.join("manifest.csv");
    let entries = if manifest_path.exists() && !a.fresh {
        let text =
            std::fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
        manifest_from_csv(&text)?
    } else {
        generate_grid(&spec.grid, &a.out)?
    };

    let rows = run_experiment(&spec, &a.out, &entries)?;
    let scores_path = a.out.join("scores.csv");
    std::fs::write(&scores_path, scores_to_csv(&rows)).map_err(|e| Error::io(&scores_path, e))?;
    let timings_path = a.out.join("timings.csv");
    std::fs::write(&timings_path, timings_to_csv(&rows))
        .map_err(|e| Error::io(&timings_path, e))?;
    if !rows.is_empty() {
        let summary = summarize(&rows)?;
        let summary_path = a.out.join("summary.csv");
        std::fs::write(&summary_path, summary_to_csv(&summary))
            .map_err(|e| Error::io(&summary_path, e))?;
    }

    let failed = rows.iter().filter(|r| r.status == "failed").count();
    println!(
        "{} cells ({} failed); results in {}",
        rows.len(),
        failed,
        a.out.display()
    );
    Ok(if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_corr(a: CorrArgs) -> Result<ExitCode> {
    init_thread_pool(a.jobs);
    let params = a.kernel.params()?;
    let ds = load_dataset(&a.data, a.kernel.zscore)?;
    let opts = a.kernel.alignment_options(a.jobs);
    let pseudo = pseudo_correlation_with(&ds, &params, &opts)?;
    match a.out {
        Some(path) => {
            std::fs::write(&path, pseudo.to_csv()).map_err(|e| Error::io(&path, e))?;
            println!("wrote {}", path.display());
        }
        None => print!("{}", pseudo.to_csv()),
    }
    Ok(ExitCode::SUCCESS)
}
