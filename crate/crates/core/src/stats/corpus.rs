use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::genome::Genome;
use crate::metrics::{null_anchor, null_models, residual, Metric, NullModelConfig};
use crate::neat::InnovationRegistry;

/// One published genome. Residuals are missing when no null models could be
/// grown for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub genome_id: String,
    pub parent_id: Option<String>,
    pub fitness: u64,
    pub q_residual: Option<f64>,
    pub h_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Corpus {
    pub records: Vec<CorpusRecord>,
}

/// Direct-descendant counts: how many entries name each id as parent.
pub fn descendant_counts<'a>(
    links: impl IntoIterator<Item = (&'a str, Option<&'a str>)>,
) -> HashMap<&'a str, u64> {
    let mut counts = HashMap::new();
    let mut parents = Vec::new();
    for (id, parent) in links {
        counts.entry(id).or_insert(0);
        parents.extend(parent);
    }
    for p in parents {
        if let Some(c) = counts.get_mut(p) {
            *c += 1;
        }
    }
    counts
}

/// `(genome_id, parent_id, q_residual, h_residual)`.
pub type LinkRow = (String, Option<String>, Option<f64>, Option<f64>);

impl Corpus {
    /// Builds records from link rows, filling in fitness from the parent links.
    pub fn from_links(rows: Vec<LinkRow>) -> Self {
        let counts: HashMap<String, u64> =
            descendant_counts(rows.iter().map(|r| (r.0.as_str(), r.1.as_deref())))
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
        let records = rows
            .into_iter()
            .map(
                |(genome_id, parent_id, q_residual, h_residual)| CorpusRecord {
                    fitness: counts[&genome_id],
                    genome_id,
                    parent_id,
                    q_residual,
                    h_residual,
                },
            )
            .collect();
        Self { records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

pub fn fitness(corpus: &Corpus, genome_id: &str) -> Result<u64, StatsError> {
    corpus
        .records
        .iter()
        .find(|r| r.genome_id == genome_id)
        .map(|r| r.fitness)
        .ok_or_else(|| StatsError::UnknownGenome(genome_id.to_string()))
}

/// Scores every genome against null models grown from its anchor and
/// returns the corpus with fitness and residuals.
///
/// Each genome gets its own rng (seeded from `rng` in input order) and its
/// own copy of a registry that has seen the whole corpus, so the result does
/// not depend on scheduling.
pub fn score_corpus<R: Rng + ?Sized>(
    genomes: &[Genome],
    cfg: &NullModelConfig,
    rng: &mut R,
) -> Corpus {
    let mut registry = InnovationRegistry::new();
    for g in genomes {
        registry.observe(g);
    }
    let by_id: HashMap<&str, &Genome> = genomes.iter().map(|g| (g.id.as_str(), g)).collect();
    let seeds: Vec<u64> = genomes.iter().map(|_| rng.random()).collect();
    let scored: Vec<(Option<f64>, Option<f64>)> = genomes
        .par_iter()
        .zip(seeds)
        .map(|(g, seed)| {
            let mut reg = registry.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let parent = g.parent_id.as_deref().and_then(|p| by_id.get(p)).copied();
            let parent = null_anchor(g, parent, &mut reg);
            match null_models(g, &parent, cfg, &mut reg, &mut rng) {
                Ok(batch) => (
                    residual(Metric::Modularity, g, &batch)
                        .ok()
                        .map(|s| s.residual),
                    residual(Metric::Hierarchy, g, &batch)
                        .ok()
                        .map(|s| s.residual),
                ),
                Err(_) => (None, None),
            }
        })
        .collect();
    Corpus::from_links(
        genomes
            .iter()
            .zip(scored)
            .map(|(g, (q, h))| (g.id.clone(), g.parent_id.clone(), q, h))
            .collect(),
    )
}
