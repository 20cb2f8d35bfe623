//! Weight, add-node and add-connection mutations, plus seed genomes.
//!
//! There are no deletion mutations: node count and total connection count
//! never decrease along a mutation chain.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::registry::InnovationRegistry;
use super::NeatError;
use crate::activation::Activation;
use crate::genome::{ConnectionGene, Genome, Innovation, NodeGene, NodeKind, Palette};

/// Candidate pairs tried by add-connection before it reports saturation.
pub const ADD_CONNECTION_ATTEMPTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationConfig {
    pub p_weight: f64,
    pub p_add_connection: f64,
    pub p_add_node: f64,
    pub weight_sigma: f64,
    pub weight_bounds: (f64, f64),
}

impl Default for MutationConfig {
    fn default() -> Self {
        Self {
            p_weight: 0.3,
            p_add_connection: 0.1,
            p_add_node: 0.06,
            weight_sigma: 1.0,
            weight_bounds: crate::genome::WEIGHT_BOUNDS,
        }
    }
}

impl MutationConfig {
    /// All probabilities zero: offspring are exact copies.
    pub fn frozen() -> Self {
        Self {
            p_weight: 0.0,
            p_add_connection: 0.0,
            p_add_node: 0.0,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<(), NeatError> {
        for (name, p) in [
            ("p_weight", self.p_weight),
            ("p_add_connection", self.p_add_connection),
            ("p_add_node", self.p_add_node),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(NeatError::InvalidConfig(format!(
                    "{name} = {p} not in [0, 1]"
                )));
            }
        }
        if !(self.weight_sigma > 0.0 && self.weight_sigma.is_finite()) {
            return Err(NeatError::InvalidConfig(format!(
                "weight_sigma = {} must be positive",
                self.weight_sigma
            )));
        }
        let (lo, hi) = self.weight_bounds;
        if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
            return Err(NeatError::InvalidConfig(format!(
                "weight_bounds ({lo}, {hi})"
            )));
        }
        Ok(())
    }
}

/// Replacement draw for a mutated weight, before clamping.
pub fn replacement_weight<R: Rng + ?Sized>(old: f64, sigma: f64, rng: &mut R) -> f64 {
    Normal::new(old, sigma)
        .expect("sigma checked positive")
        .sample(rng)
}

/// Uniform weight for a brand-new connection.
pub fn random_weight<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let (lo, hi) = crate::genome::WEIGHT_BOUNDS;
    rng.random_range(lo..=hi)
}

pub fn mutate_weights<R: Rng + ?Sized>(
    genome: &Genome,
    cfg: &MutationConfig,
    rng: &mut R,
) -> Genome {
    let mut out = genome.clone();
    let (lo, hi) = cfg.weight_bounds;
    for c in &mut out.connections {
        if rng.random_bool(cfg.p_weight) {
            c.weight = replacement_weight(c.weight, cfg.weight_sigma, rng).clamp(lo, hi);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum AddConnection {
    Added {
        genome: Genome,
        connection: Innovation,
    },
    /// No legal pair found within the attempt budget; the genome is unchanged.
    Saturated,
}

/// Adds an enabled connection between a uniformly chosen legal pair.
///
/// Candidates are absent pairs with a non-output source and a non-input
/// target, visited in random order without replacement; the first one that
/// keeps the enabled graph acyclic is taken. At most
/// [`ADD_CONNECTION_ATTEMPTS`] candidates are tried.
pub fn mutate_add_connection<R: Rng + ?Sized>(
    genome: &Genome,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> AddConnection {
    let mut candidates: Vec<(Innovation, Innovation)> = Vec::new();
    for s in genome.nodes.iter().filter(|n| !n.kind.is_output()) {
        for t in genome.nodes.iter().filter(|n| !n.kind.is_input()) {
            if s.innovation != t.innovation && !genome.has_pair(s.innovation, t.innovation) {
                candidates.push((s.innovation, t.innovation));
            }
        }
    }
    for _ in 0..ADD_CONNECTION_ATTEMPTS {
        if candidates.is_empty() {
            break;
        }
        let (source, target) = candidates.swap_remove(rng.random_range(0..candidates.len()));
        if genome.enabled_path_exists(target, source) {
            continue;
        }
        let weight = random_weight(rng);
        let id = registry.connection(source, target);
        let mut out = genome.clone();
        out.insert_connection(ConnectionGene::new(id, source, target, weight));
        return AddConnection::Added {
            genome: out,
            connection: id,
        };
    }
    AddConnection::Saturated
}

#[derive(Debug, Clone, PartialEq)]
pub enum AddNode {
    Added {
        genome: Genome,
        node: Innovation,
    },
    /// The genome has no enabled connection to split.
    NoEnabledConnection,
}

/// Splits `connection` (u→v, weight w): disables it and inserts node n with
/// u→n at weight 1 and n→v at weight w.
pub fn add_node_on(
    genome: &Genome,
    connection: Innovation,
    activation: Activation,
    registry: &mut InnovationRegistry,
) -> Result<(Genome, Innovation), NeatError> {
    let idx = genome
        .connection_index(connection)
        .ok_or(NeatError::UnknownConnection(connection))?;
    let old = &genome.connections[idx];
    if !old.enabled {
        return Err(NeatError::DisabledConnection(connection));
    }
    let (u, v, w) = (old.source, old.target, old.weight);
    let mut node = registry.split_node(connection);
    // A genome assembled by crossover can already hold the node this split
    // would produce; the event is then new to this genome and gets a new id.
    let taken = |g: &Genome, n: Innovation| {
        g.node(n).is_some() || g.connection(n).is_some() || g.has_pair(u, n) || g.has_pair(n, v)
    };
    if taken(genome, node) {
        node = registry.fresh();
    }
    let mut out = genome.clone();
    out.connections[idx].enabled = false;
    out.insert_node(NodeGene::new(node, NodeKind::Hidden, activation));
    let into = registry.connection(u, node);
    let from = registry.connection(node, v);
    out.insert_connection(ConnectionGene::new(into, u, node, 1.0));
    out.insert_connection(ConnectionGene::new(from, node, v, w));
    Ok((out, node))
}

pub fn mutate_add_node<R: Rng + ?Sized>(
    genome: &Genome,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> AddNode {
    let enabled: Vec<Innovation> = genome
        .connections
        .iter()
        .filter(|c| c.enabled)
        .map(|c| c.innovation)
        .collect();
    let Some(&conn) = enabled.choose(rng) else {
        return AddNode::NoEnabledConnection;
    };
    let activation = *Activation::HIDDEN_CHOICES.choose(rng).expect("non-empty");
    let (genome, node) =
        add_node_on(genome, conn, activation, registry).expect("enabled connection");
    AddNode::Added { genome, node }
}

/// Full mutation step: weights, then possibly add-node, then possibly
/// add-connection.
pub fn mutate<R: Rng + ?Sized>(
    genome: &Genome,
    cfg: &MutationConfig,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> Genome {
    let mut out = mutate_weights(genome, cfg, rng);
    if rng.random_bool(cfg.p_add_node) {
        if let AddNode::Added { genome, .. } = mutate_add_node(&out, registry, rng) {
            out = genome;
        }
    }
    if rng.random_bool(cfg.p_add_connection) {
        if let AddConnection::Added { genome, .. } = mutate_add_connection(&out, registry, rng) {
            out = genome;
        }
    }
    out
}

/// Identifier for a new genome drawn from `rng`, so seeded runs reproduce ids.
pub fn fresh_genome_id<R: Rng + ?Sized>(rng: &mut R) -> String {
    uuid::Builder::from_random_bytes(rng.random())
        .into_uuid()
        .to_string()
}

/// Minimal genome: every input wired to every output with a uniform weight.
pub fn seed_genome<R: Rng + ?Sized>(
    palette: Palette,
    registry: &mut InnovationRegistry,
    rng: &mut R,
) -> Genome {
    let nodes = Genome::io_nodes(palette);
    let mut conns = Vec::new();
    for input in NodeKind::INPUTS {
        for &output in palette.outputs() {
            let s = input.reserved_innovation().expect("io");
            let t = output.reserved_innovation().expect("io");
            let id = registry.connection(s, t);
            conns.push(ConnectionGene::new(id, s, t, random_weight(rng)));
        }
    }
    Genome::new(fresh_genome_id(rng), palette, nodes, conns)
}
