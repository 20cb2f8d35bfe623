use std::collections::HashMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::genome::{Genome, Innovation};

/// First innovation id not reserved for the fixed input/output nodes.
pub const FIRST_FREE_INNOVATION: u64 = 7;

/// Assigns historical markings. The same structural event (a given
/// `(source, target)` connection, or the split of a given connection) always
/// maps to the same id; ids are never reused.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationRegistry {
    next_id: u64,
    connections: HashMap<(Innovation, Innovation), Innovation>,
    splits: HashMap<Innovation, Innovation>,
}

impl Default for InnovationRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl InnovationRegistry {
    pub fn new() -> Self {
        Self {
            next_id: FIRST_FREE_INNOVATION,
            connections: HashMap::new(),
            splits: HashMap::new(),
        }
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    /// A brand-new id tied to no structural event.
    pub fn fresh(&mut self) -> Innovation {
        let id = Innovation(self.next_id);
        self.next_id += 1;
        id
    }

    pub fn connection(&mut self, source: Innovation, target: Innovation) -> Innovation {
        if let Some(&id) = self.connections.get(&(source, target)) {
            return id;
        }
        let id = self.fresh();
        self.connections.insert((source, target), id);
        id
    }

    pub fn lookup_connection(&self, source: Innovation, target: Innovation) -> Option<Innovation> {
        self.connections.get(&(source, target)).copied()
    }

    /// Node id created by splitting `connection`.
    pub fn split_node(&mut self, connection: Innovation) -> Innovation {
        if let Some(&id) = self.splits.get(&connection) {
            return id;
        }
        let id = self.fresh();
        self.splits.insert(connection, id);
        id
    }

    /// Registers a genome's connection pairs and moves the counter past every
    /// id it carries, so that genomes loaded from disk stay consistent.
    pub fn observe(&mut self, genome: &Genome) {
        for c in &genome.connections {
            self.connections
                .entry((c.source, c.target))
                .or_insert(c.innovation);
        }
        if let Some(max) = genome.max_innovation() {
            self.next_id = self.next_id.max(max.0 + 1);
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RegistryDoc {
    next_id: u64,
    /// `[source, target, innovation]`
    connections: Vec<[u64; 3]>,
    /// `[split connection, node]`
    splits: Vec<[u64; 2]>,
}

impl Serialize for InnovationRegistry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut connections: Vec<[u64; 3]> = self
            .connections
            .iter()
            .map(|(&(a, b), &id)| [a.0, b.0, id.0])
            .collect();
        connections.sort_unstable_by_key(|e| e[2]);
        let mut splits: Vec<[u64; 2]> = self.splits.iter().map(|(&c, &n)| [c.0, n.0]).collect();
        splits.sort_unstable();
        RegistryDoc {
            next_id: self.next_id,
            connections,
            splits,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for InnovationRegistry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = RegistryDoc::deserialize(d)?;
        Ok(Self {
            next_id: doc.next_id,
            connections: doc
                .connections
                .into_iter()
                .map(|[a, b, id]| ((Innovation(a), Innovation(b)), Innovation(id)))
                .collect(),
            splits: doc
                .splits
                .into_iter()
                .map(|[c, n]| (Innovation(c), Innovation(n)))
                .collect(),
        })
    }
}
