use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use breeder_core::metrics::{GenomeMetrics, NullModelConfig};
use breeder_core::neat::{next_generation, InnovationRegistry, MutationConfig, Session};
use breeder_core::probe::{sweep, SweepSpec};
use breeder_core::stats::{
    corpus_report, score_corpus, ReportConfig, DEFAULT_BINS, DEFAULT_RESAMPLES,
};
use breeder_core::{CppnConfig, Innovation, Palette};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{read_genome, read_genome_dir, score_genome, store_genomes, write_bins_csv};
use crate::api::{open_store, serve, AppState, ServiceConfig};

pub type CliResult = Result<(), Box<dyn std::error::Error + Send + Sync>>;

#[derive(Debug, Parser)]
#[command(
    name = "breeder",
    version,
    about = "Breed, probe and analyse CPPN images"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a genome (or one of its nodes) to PNG.
    Render(RenderArgs),
    /// Step a population with a fixed selection.
    Evolve(EvolveArgs),
    /// Sweep one connection weight and write the frames.
    Sweep(SweepArgs),
    /// Modularity and hierarchy residuals against null models.
    Metrics(MetricsArgs),
    /// Fitness statistics over a corpus of genomes.
    Corpus(CorpusArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub genome: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    /// Render the activation of this node instead of the output.
    #[arg(long)]
    pub node: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Genome JSON to branch from, or `scratch`.
    #[arg(long, default_value = "scratch")]
    pub from: String,
    #[arg(long, default_value = "gray")]
    pub palette: Palette,
    /// Slots kept each generation.
    #[arg(long, value_delimiter = ',', required = true)]
    pub select: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub steps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = breeder_core::neat::DEFAULT_POPULATION)]
    pub population: usize,
    /// Directory for the final population (genome JSON and PNG per slot).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    pub image_size: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub genome: PathBuf,
    #[arg(long)]
    pub connection: u64,
    /// 0.01 steps instead of 0.1.
    #[arg(long)]
    pub fine: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub genome: PathBuf,
    /// Published ancestor; the palette's seed topology when omitted.
    #[arg(long)]
    pub parent: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub nulls: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Match total rather than enabled connection counts.
    #[arg(long)]
    pub count_disabled: bool,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Directory of genome JSON files linked by parent_id.
    #[arg(long, conflicts_with = "store", required_unless_present = "store")]
    pub dir: Option<PathBuf>,
    /// Store directory written by `serve`.
    #[arg(long)]
    pub store: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub nulls: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    pub resamples: usize,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    #[arg(long)]
    pub count_disabled: bool,
    #[arg(long)]
    pub report: PathBuf,
    /// Bin tables; defaults to the report path with a .csv extension.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Store directory; in memory when omitted.
    #[arg(long)]
    pub store: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Built UI assets to serve at /.
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
    #[arg(long, default_value_t = breeder_core::neat::DEFAULT_POPULATION)]
    pub population: usize,
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Render(a) => render(a),
        Command::Evolve(a) => evolve(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Metrics(a) => metrics(a),
        Command::Corpus(a) => corpus(a),
        Command::Serve(a) => run_serve(a),
    }
}

fn print_json<T: Serialize>(value: &T) -> CliResult {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn render(a: RenderArgs) -> CliResult {
    let genome = read_genome(&a.genome)?;
    let img = match a.node {
        Some(n) => breeder_core::render_node(&genome, Innovation(n), a.size, a.size)?,
        None => breeder_core::render(&genome, a.size, a.size)?,
    };
    img.save_png(&a.out)?;
    Ok(())
}

#[derive(Serialize)]
struct EvolveSummary {
    seed: u64,
    generation: u64,
    population: Vec<String>,
}

fn evolve(a: EvolveArgs) -> CliResult {
    let mut registry = InnovationRegistry::new();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let cfg = MutationConfig::default();
    let mut session = if a.from == "scratch" {
        Session::scratch(
            "cli",
            a.palette,
            a.population,
            a.seed,
            &mut registry,
            &mut rng,
        )?
    } else {
        let parent = read_genome(Path::new(&a.from))?;
        Session::branched(
            "cli",
            &parent,
            a.population,
            a.seed,
            &cfg,
            &mut registry,
            &mut rng,
        )?
    };
    for _ in 0..a.steps {
        session = next_generation(&session, &a.select, &cfg, &mut registry, &mut rng)?;
    }
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        for (k, g) in session.population.iter().enumerate() {
            fs::write(dir.join(format!("{k:02}.json")), g.to_canonical_json())?;
            breeder_core::render(g, a.image_size, a.image_size)?
                .save_png(dir.join(format!("{k:02}.png")))?;
        }
    }
    print_json(&EvolveSummary {
        seed: a.seed,
        generation: session.generation,
        population: session.population.iter().map(|g| g.id.clone()).collect(),
    })
}

#[derive(Serialize)]
struct SweepSummary {
    spec: SweepSpec,
    baseline_weight: f64,
    frames: Vec<(String, f64)>,
    impact: breeder_core::probe::ImpactSummary,
}

fn run_sweep(a: SweepArgs) -> CliResult {
    let genome = read_genome(&a.genome)?;
    let mut spec = SweepSpec::new(Innovation(a.connection), a.size, a.size);
    if a.fine {
        spec = spec.fine();
    }
    spec.lo = a.lo.unwrap_or(spec.lo);
    spec.hi = a.hi.unwrap_or(spec.hi);
    spec.step = a.step.unwrap_or(spec.step);
    let result = sweep(&genome, &spec, CppnConfig::default())?;
    fs::create_dir_all(&a.out)?;
    let digits = result.frames.len().to_string().len().max(3);
    let mut frames = Vec::with_capacity(result.frames.len());
    for (k, f) in result.frames.iter().enumerate() {
        let name = format!("frame_{k:0digits$}.png");
        f.image.save_png(a.out.join(&name))?;
        frames.push((name, f.weight));
    }
    let summary = SweepSummary {
        spec: result.spec,
        baseline_weight: result.baseline_weight,
        frames,
        impact: result.impact.summary(),
    };
    fs::write(
        a.out.join("impact.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    Ok(())
}

fn metrics(a: MetricsArgs) -> CliResult {
    let genome = read_genome(&a.genome)?;
    let parent = a.parent.as_deref().map(read_genome).transpose()?;
    let cfg = NullModelConfig {
        count: a.nulls,
        count_disabled: a.count_disabled,
    };
    let r = score_genome(&genome, parent.as_ref(), &cfg, a.seed)?;
    print_json(&GenomeMetrics {
        q_raw: r.modularity.raw,
        q_null_mean: r.modularity.null_mean,
        q_residual: r.modularity.residual,
        h_raw: r.hierarchy.raw,
        h_null_mean: r.hierarchy.null_mean,
        h_residual: r.hierarchy.residual,
        partition: r.partition,
    })
}

fn corpus(a: CorpusArgs) -> CliResult {
    let genomes = match (&a.dir, &a.store) {
        (Some(dir), _) => read_genome_dir(dir)?,
        (None, Some(store)) => store_genomes(&open_store(Some(store))?),
        (None, None) => unreachable!("clap requires one of --dir and --store"),
    };
    let cfg = NullModelConfig {
        count: a.nulls,
        count_disabled: a.count_disabled,
    };
    let report_cfg = ReportConfig {
        bins: a.bins,
        resamples: a.resamples,
        ..ReportConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let scored = score_corpus(&genomes, &cfg, &mut rng);
    let report = corpus_report(&scored, &report_cfg, &mut rng)?;
    fs::write(&a.report, serde_json::to_string_pretty(&report)?)?;
    let csv_path = a.csv.unwrap_or_else(|| a.report.with_extension("csv"));
    write_bins_csv(&report, fs::File::create(csv_path)?)?;
    Ok(())
}

fn run_serve(a: ServeArgs) -> CliResult {
    let store = open_store(a.store.as_deref())?;
    let state = Arc::new(AppState::new(
        store,
        ServiceConfig {
            population: a.population,
            static_dir: a.static_dir,
            ..ServiceConfig::default()
        },
    ));
    let addr = SocketAddr::new(a.host, a.port);
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    rt.block_on(async move {
        eprintln!("listening on http://{addr}");
        serve(state, addr, shutdown_signal()).await
    })?;
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
