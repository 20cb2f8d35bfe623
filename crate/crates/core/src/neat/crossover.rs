use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use rand::Rng;

use super::NeatError;
use crate::genome::{ConnectionGene, Genome, Innovation, NodeGene};

/// Child genome plus the genes crossover had to leave out.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverOutcome {
    pub child: Genome,
    /// Connections dropped because admitting them would close an enabled
    /// cycle or repeat an already admitted `(source, target)` pair.
    pub skipped: Vec<Innovation>,
    /// Hidden nodes (and their remaining connections) dropped because the
    /// skips left them off every input-to-output path.
    pub pruned_nodes: Vec<Innovation>,
}

/// Aligns two genomes by innovation. Genes in both parents come from either
/// with probability ½; genes in one parent are always inherited. Connections
/// are admitted in ascending innovation order.
pub fn crossover<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    rng: &mut R,
) -> Result<Genome, NeatError> {
    crossover_detailed(a, b, rng).map(|o| o.child)
}

pub fn crossover_detailed<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    rng: &mut R,
) -> Result<CrossoverOutcome, NeatError> {
    if a.palette != b.palette {
        return Err(NeatError::PaletteMismatch);
    }

    let mut nodes: BTreeMap<Innovation, NodeGene> = BTreeMap::new();
    for n in &a.nodes {
        nodes.insert(n.innovation, n.clone());
    }
    for n in &b.nodes {
        match nodes.get_mut(&n.innovation) {
            Some(slot) => {
                if rng.random_bool(0.5) {
                    *slot = n.clone();
                }
            }
            None => {
                nodes.insert(n.innovation, n.clone());
            }
        }
    }

    let mut genes: BTreeMap<Innovation, ConnectionGene> = BTreeMap::new();
    for c in &a.connections {
        genes.insert(c.innovation, c.clone());
    }
    for c in &b.connections {
        match genes.get_mut(&c.innovation) {
            Some(slot) => {
                if rng.random_bool(0.5) {
                    *slot = c.clone();
                }
            }
            None => {
                genes.insert(c.innovation, c.clone());
            }
        }
    }

    let mut admitted: Vec<ConnectionGene> = Vec::with_capacity(genes.len());
    let mut pairs: HashSet<(Innovation, Innovation)> = HashSet::new();
    let mut out_edges: HashMap<Innovation, Vec<Innovation>> = HashMap::new();
    let mut skipped = Vec::new();
    for (id, c) in genes {
        let closes_cycle = c.enabled && reaches(&out_edges, c.target, c.source);
        if closes_cycle || pairs.contains(&(c.source, c.target)) {
            skipped.push(id);
            continue;
        }
        pairs.insert((c.source, c.target));
        if c.enabled {
            out_edges.entry(c.source).or_default().push(c.target);
        }
        admitted.push(c);
    }

    let mut child = Genome::new(
        a.id.clone(),
        a.palette,
        nodes.into_values().collect(),
        admitted,
    );
    let mut pruned_nodes = Vec::new();
    loop {
        let orphans = child.orphan_hidden_nodes();
        if orphans.is_empty() {
            break;
        }
        let gone: HashSet<Innovation> = orphans.iter().copied().collect();
        child.nodes.retain(|n| !gone.contains(&n.innovation));
        child
            .connections
            .retain(|c| !gone.contains(&c.source) && !gone.contains(&c.target));
        pruned_nodes.extend(orphans);
    }
    pruned_nodes.sort();

    let violations = child.validate();
    if !violations.is_empty() {
        return Err(NeatError::InvalidGenome(violations));
    }
    Ok(CrossoverOutcome {
        child,
        skipped,
        pruned_nodes,
    })
}

fn reaches(out: &HashMap<Innovation, Vec<Innovation>>, from: Innovation, to: Innovation) -> bool {
    if from == to {
        return true;
    }
    let mut seen = HashSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in out.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            if v == to {
                return true;
            }
            if seen.insert(v) {
                queue.push_back(v);
            }
        }
    }
    false
}
