//! Mutation-matched null models and residual scores.
//!
//! A null model replays growth on the parent genome: the same number of
//! add-node and add-connection mutations that separate parent and source,
//! in random order, so that it ends with exactly the source's node and
//! connection counts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::genome_to_graph;
use super::hierarchy::grc_hierarchy;
use super::modularity::optimal_partition;
use super::MetricsError;
use crate::genome::{Genome, Innovation};
use crate::neat::{
    mutate_add_connection, mutate_add_node, seed_genome, AddConnection, AddNode, InnovationRegistry,
};

/// Whole-model retries before a saturated add-connection becomes an error.
pub const NULL_MODEL_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullModelConfig {
    pub count: usize,
    /// Match total (enabled + disabled) connections instead of enabled ones.
    pub count_disabled: bool,
}

impl Default for NullModelConfig {
    fn default() -> Self {
        Self {
            count: 10,
            count_disabled: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullModelBatch {
    pub source_genome_id: String,
    pub parent_genome_id: String,
    pub config: NullModelConfig,
    pub models: Vec<Genome>,
}

#[derive(Debug, Clone, Copy)]
enum Growth {
    Node,
    Connection,
}

/// Number of (add-node, add-connection) mutations separating parent and source.
pub fn growth_plan(
    source: &Genome,
    parent: &Genome,
    cfg: &NullModelConfig,
) -> Result<(usize, usize), MetricsError> {
    let infeasible = |reason: String| MetricsError::Infeasible(reason);
    if source.palette != parent.palette {
        return Err(infeasible("source and parent palettes differ".into()));
    }
    let dn = source.nodes.len() as i64 - parent.nodes.len() as i64;
    if dn < 0 {
        return Err(infeasible(format!(
            "source has {} fewer nodes than parent",
            -dn
        )));
    }
    let adds = if cfg.count_disabled {
        let dt = source.connections.len() as i64 - parent.connections.len() as i64;
        dt - 2 * dn
    } else {
        let dc =
            source.enabled_connection_count() as i64 - parent.enabled_connection_count() as i64;
        dc - dn
    };
    if adds < 0 {
        return Err(infeasible(format!(
            "{dn} add-node mutations need more connections than the source gained"
        )));
    }
    Ok((dn as usize, adds as usize))
}

/// Genome the null models of `genome` grow from: its published parent when
/// known, otherwise the minimal seed topology of the same palette.
pub fn null_anchor(
    genome: &Genome,
    parent: Option<&Genome>,
    registry: &mut InnovationRegistry,
) -> Genome {
    if let Some(p) = parent {
        return p.clone();
    }
    // weights do not affect structural metrics, so a fixed stream is fine
    let mut seed = seed_genome(genome.palette, registry, &mut ChaCha8Rng::seed_from_u64(0));
    seed.id = format!("{}-seed", genome.id);
    seed
}

pub fn null_models<R: Rng + ?Sized>(
    source: &Genome,
    parent: &Genome,
    cfg: &NullModelConfig,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> Result<NullModelBatch, MetricsError> {
    let (nodes, conns) = growth_plan(source, parent, cfg)?;
    let mut plan: Vec<Growth> = std::iter::repeat_n(Growth::Node, nodes)
        .chain(std::iter::repeat_n(Growth::Connection, conns))
        .collect();
    let mut models = Vec::with_capacity(cfg.count);
    for k in 0..cfg.count {
        let mut built = None;
        for _ in 0..NULL_MODEL_RETRIES {
            plan.shuffle(rng);
            if let Some(g) = grow(parent, &plan, registry, rng) {
                built = Some(g);
                break;
            }
        }
        let mut model = built.ok_or(MetricsError::Saturated)?;
        model.id = format!("{}-null{k}", source.id);
        model.parent_id = Some(parent.id.clone());
        models.push(model);
    }
    Ok(NullModelBatch {
        source_genome_id: source.id.clone(),
        parent_genome_id: parent.id.clone(),
        config: *cfg,
        models,
    })
}

fn grow<R: Rng + ?Sized>(
    parent: &Genome,
    plan: &[Growth],
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> Option<Genome> {
    let mut g = parent.clone();
    for step in plan {
        g = match step {
            Growth::Node => match mutate_add_node(&g, registry, rng) {
                AddNode::Added { genome, .. } => genome,
                AddNode::NoEnabledConnection => return None,
            },
            Growth::Connection => match mutate_add_connection(&g, registry, rng) {
                AddConnection::Added { genome, .. } => genome,
                AddConnection::Saturated => return None,
            },
        };
    }
    Some(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Modularity,
    Hierarchy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualScore {
    pub metric: Metric,
    pub raw: f64,
    pub null_mean: f64,
    pub residual: f64,
}

/// Optimal-split Q or reaching-centrality hierarchy of a genome's graph.
pub fn metric_value(metric: Metric, genome: &Genome) -> Result<f64, MetricsError> {
    let graph = genome_to_graph(genome).graph;
    match metric {
        Metric::Modularity => optimal_partition(&graph).map(|(_, q)| q),
        Metric::Hierarchy => grc_hierarchy(&graph),
    }
}

pub fn residual(
    metric: Metric,
    source: &Genome,
    batch: &NullModelBatch,
) -> Result<ResidualScore, MetricsError> {
    if batch.source_genome_id != source.id {
        return Err(MetricsError::BatchMismatch {
            batch: batch.source_genome_id.clone(),
            source_id: source.id.clone(),
        });
    }
    if batch.models.is_empty() {
        return Err(MetricsError::EmptyBatch);
    }
    let raw = metric_value(metric, source)?;
    let values = batch
        .models
        .iter()
        .map(|m| metric_value(metric, m))
        .collect::<Result<Vec<f64>, _>>()?;
    // offset from the first value so identical scores average exactly
    let first = values[0];
    let null_mean = first + values.iter().map(|v| v - first).sum::<f64>() / values.len() as f64;
    Ok(ResidualScore {
        metric,
        raw,
        null_mean,
        residual: raw - null_mean,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleAssignment {
    pub node: Innovation,
    pub module: usize,
}

/// Everything the `metrics` command and endpoint report for one genome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenomeMetrics {
    pub q_raw: f64,
    pub q_null_mean: f64,
    pub q_residual: f64,
    pub h_raw: f64,
    pub h_null_mean: f64,
    pub h_residual: f64,
    pub partition: Vec<ModuleAssignment>,
}

pub fn analyze<R: Rng + ?Sized>(
    source: &Genome,
    parent: &Genome,
    cfg: &NullModelConfig,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> Result<GenomeMetrics, MetricsError> {
    let batch = null_models(source, parent, cfg, registry, rng)?;
    let q = residual(Metric::Modularity, source, &batch)?;
    let h = residual(Metric::Hierarchy, source, &batch)?;
    Ok(GenomeMetrics {
        q_raw: q.raw,
        q_null_mean: q.null_mean,
        q_residual: q.residual,
        h_raw: h.raw,
        h_null_mean: h.null_mean,
        h_residual: h.residual,
        partition: module_assignments(source)?,
    })
}

/// Best split of the genome's graph, as a module index per node.
pub fn module_assignments(genome: &Genome) -> Result<Vec<ModuleAssignment>, MetricsError> {
    let gg = genome_to_graph(genome);
    let (partition, _) = optimal_partition(&gg.graph)?;
    Ok(gg
        .nodes
        .iter()
        .zip(partition.assignment())
        .map(|(&node, &module)| ModuleAssignment { node, module })
        .collect())
}
