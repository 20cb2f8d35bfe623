//! Metric and corpus computations shared by the CLI and the HTTP API.

use std::fs;
use std::io;
use std::path::Path;

use breeder_core::metrics::{
    module_assignments, null_anchor, null_models, residual, Metric, MetricsError, ModuleAssignment,
    NullModelConfig, ResidualScore,
};
use breeder_core::neat::InnovationRegistry;
use breeder_core::stats::{CorpusReport, ResidualReport};
use breeder_core::store::Store;
use breeder_core::Genome;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Residual scores of one genome against its null models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub genome_id: String,
    /// Genome the null models were grown from.
    pub anchor_id: String,
    pub nulls: usize,
    pub seed: u64,
    pub modularity: ResidualScore,
    pub hierarchy: ResidualScore,
    pub partition: Vec<ModuleAssignment>,
}

/// Scores `genome` against null models grown from `parent` (or the palette's
/// seed topology). The registry only knows the two genomes involved, so the
/// result depends on nothing but the inputs and `seed`.
pub fn score_genome(
    genome: &Genome,
    parent: Option<&Genome>,
    cfg: &NullModelConfig,
    seed: u64,
) -> Result<MetricsReport, MetricsError> {
    let mut registry = InnovationRegistry::new();
    registry.observe(genome);
    if let Some(p) = parent {
        registry.observe(p);
    }
    let anchor = null_anchor(genome, parent, &mut registry);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batch = null_models(genome, &anchor, cfg, &mut registry, &mut rng)?;
    Ok(MetricsReport {
        genome_id: genome.id.clone(),
        anchor_id: anchor.id,
        nulls: cfg.count,
        seed,
        modularity: residual(Metric::Modularity, genome, &batch)?,
        hierarchy: residual(Metric::Hierarchy, genome, &batch)?,
        partition: module_assignments(genome)?,
    })
}

pub fn read_genome(path: &Path) -> io::Result<Genome> {
    let text = fs::read_to_string(path)?;
    Genome::from_json(&text).map_err(|e| {
        io::Error::new(
            io::ErrorKind::InvalidData,
            format!("{}: {e}", path.display()),
        )
    })
}

/// Every `*.json` genome in `dir`, in file-name order.
pub fn read_genome_dir(dir: &Path) -> io::Result<Vec<Genome>> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    paths.iter().map(|p| read_genome(p)).collect()
}

/// Published genomes with their parent links taken from the records.
pub fn store_genomes(store: &Store) -> Vec<Genome> {
    store
        .records()
        .iter()
        .map(|r| {
            let mut g = r.genome.clone();
            g.parent_id = r.parent_id.clone();
            g
        })
        .collect()
}

/// Bin tables of both metrics as CSV.
pub fn write_bins_csv<W: io::Write>(report: &CorpusReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "metric",
        "bin",
        "lo",
        "hi",
        "count",
        "mean_fitness",
        "ci_lo",
        "ci_hi",
    ])?;
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for (name, r) in [
        ("modularity", &report.modularity),
        ("hierarchy", &report.hierarchy),
    ] {
        let r: &ResidualReport = r;
        for (k, b) in r.bins.iter().enumerate() {
            w.write_record([
                name.to_string(),
                k.to_string(),
                b.lo.to_string(),
                b.hi.to_string(),
                b.count.to_string(),
                opt(b.mean_fitness),
                opt(b.ci_lo),
                opt(b.ci_hi),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
