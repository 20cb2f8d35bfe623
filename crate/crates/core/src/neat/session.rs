use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::crossover::crossover;
use super::mutation::{fresh_genome_id, mutate, seed_genome, MutationConfig};
use super::registry::InnovationRegistry;
use super::NeatError;
use crate::genome::{Genome, Palette};

pub const DEFAULT_POPULATION: usize = 15;
pub const POPULATION_RANGE: std::ops::RangeInclusive<usize> = 4..=64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Scratch,
    BranchOf(String),
}

impl Origin {
    /// Image id a publish from this session descends from.
    pub fn parent_id(&self) -> Option<&str> {
        match self {
            Origin::Scratch => None,
            Origin::BranchOf(id) => Some(id),
        }
    }
}

/// One interactive breeding session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub palette: Palette,
    pub origin: Origin,
    pub generation: u64,
    pub rng_seed: u64,
    pub population: Vec<Genome>,
}

impl Session {
    pub fn scratch<R: Rng + ?Sized>(
        id: impl Into<String>,
        palette: Palette,
        size: usize,
        rng_seed: u64,
        registry: &mut InnovationRegistry,
        rng: &mut R,
    ) -> Result<Self, NeatError> {
        check_size(size)?;
        let population = (0..size)
            .map(|_| seed_genome(palette, registry, rng))
            .collect();
        Ok(Self {
            id: id.into(),
            palette,
            origin: Origin::Scratch,
            generation: 0,
            rng_seed,
            population,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn branched<R: Rng + ?Sized>(
        id: impl Into<String>,
        published: &Genome,
        size: usize,
        rng_seed: u64,
        cfg: &MutationConfig,
        registry: &mut InnovationRegistry,
        rng: &mut R,
    ) -> Result<Self, NeatError> {
        check_size(size)?;
        Ok(Self {
            id: id.into(),
            palette: published.palette,
            origin: Origin::BranchOf(published.id.clone()),
            generation: 0,
            rng_seed,
            population: branch(published, registry, cfg, rng, size)?,
        })
    }

    pub fn size(&self) -> usize {
        self.population.len()
    }
}

fn check_size(size: usize) -> Result<(), NeatError> {
    if POPULATION_RANGE.contains(&size) {
        Ok(())
    } else {
        Err(NeatError::PopulationSize(size))
    }
}

/// Steps a session forward. Selected genomes survive unchanged (in ascending
/// slot order) and the remaining slots are filled with offspring.
pub fn next_generation<R: Rng + ?Sized>(
    session: &Session,
    selected: &[usize],
    cfg: &MutationConfig,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> Result<Session, NeatError> {
    cfg.check()?;
    if selected.is_empty() {
        return Err(NeatError::EmptySelection);
    }
    let len = session.population.len();
    if let Some(&bad) = selected.iter().find(|&&i| i >= len) {
        return Err(NeatError::IndexOutOfRange { index: bad, len });
    }
    let parents: Vec<&Genome> = selected
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|i| &session.population[i])
        .collect();

    let mut population: Vec<Genome> = parents.iter().map(|&g| g.clone()).collect();
    while population.len() < len {
        let base = if parents.len() >= 2 {
            let pick = sample(rng, parents.len(), 2);
            crossover(parents[pick.index(0)], parents[pick.index(1)], rng)?
        } else {
            parents[0].clone()
        };
        population.push(offspring(&base, cfg, registry, rng));
    }
    Ok(Session {
        generation: session.generation + 1,
        population,
        ..session.clone()
    })
}

fn offspring<R: Rng + ?Sized>(
    base: &Genome,
    cfg: &MutationConfig,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> Genome {
    let mut child = mutate(base, cfg, registry, rng);
    child.id = fresh_genome_id(rng);
    child.parent_id = None;
    child.title.clear();
    child.author.clear();
    child
}

/// Initial population for a branch: the unmodified parent in slot 0, then
/// `n - 1` mutated clones.
pub fn branch<R: Rng + ?Sized>(
    published: &Genome,
    registry: &mut InnovationRegistry,
    cfg: &MutationConfig,
    rng: &mut R,
    n: usize,
) -> Result<Vec<Genome>, NeatError> {
    cfg.check()?;
    let violations = published.validate();
    if !violations.is_empty() {
        return Err(NeatError::InvalidGenome(violations));
    }
    registry.observe(published);
    let mut out = Vec::with_capacity(n);
    if n > 0 {
        out.push(published.clone());
    }
    while out.len() < n {
        out.push(offspring(published, cfg, registry, rng));
    }
    Ok(out)
}
