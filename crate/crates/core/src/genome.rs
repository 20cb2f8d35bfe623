//! Genome representation: node and connection genes, structural invariants,
//! and the canonical JSON document form.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::activation::Activation;

/// Lower and upper bound of every connection weight.
pub const WEIGHT_BOUNDS: (f64, f64) = (-3.0, 3.0);

/// Historical marking shared by node and connection genes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Innovation(pub u64);

impl fmt::Display for Innovation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for Innovation {
    fn from(v: u64) -> Self {
        Innovation(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    InputX,
    InputY,
    InputD,
    InputBias,
    Hidden,
    OutputIntensity,
    OutputHue,
    OutputSaturation,
}

impl NodeKind {
    pub const INPUTS: [NodeKind; 4] = [
        NodeKind::InputX,
        NodeKind::InputY,
        NodeKind::InputD,
        NodeKind::InputBias,
    ];

    pub fn is_input(self) -> bool {
        matches!(
            self,
            NodeKind::InputX | NodeKind::InputY | NodeKind::InputD | NodeKind::InputBias
        )
    }

    pub fn is_output(self) -> bool {
        matches!(
            self,
            NodeKind::OutputIntensity | NodeKind::OutputHue | NodeKind::OutputSaturation
        )
    }

    /// Fixed innovation id of the non-hidden nodes. Every genome shares these,
    /// so inputs and outputs always align under crossover.
    pub fn reserved_innovation(self) -> Option<Innovation> {
        let id = match self {
            NodeKind::InputX => 0,
            NodeKind::InputY => 1,
            NodeKind::InputD => 2,
            NodeKind::InputBias => 3,
            NodeKind::OutputIntensity => 4,
            NodeKind::OutputHue => 5,
            NodeKind::OutputSaturation => 6,
            NodeKind::Hidden => return None,
        };
        Some(Innovation(id))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Palette {
    Gray,
    Color,
}

impl Palette {
    pub fn outputs(self) -> &'static [NodeKind] {
        match self {
            Palette::Gray => &[NodeKind::OutputIntensity],
            Palette::Color => &[
                NodeKind::OutputIntensity,
                NodeKind::OutputHue,
                NodeKind::OutputSaturation,
            ],
        }
    }
}

impl std::str::FromStr for Palette {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gray" | "grey" => Ok(Palette::Gray),
            "color" | "colour" => Ok(Palette::Color),
            other => Err(format!("unknown palette `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeGene {
    pub innovation: Innovation,
    pub kind: NodeKind,
    pub activation: Activation,
}

impl NodeGene {
    pub fn new(innovation: impl Into<Innovation>, kind: NodeKind, activation: Activation) -> Self {
        Self {
            innovation: innovation.into(),
            kind,
            activation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionGene {
    pub innovation: Innovation,
    pub source: Innovation,
    pub target: Innovation,
    pub weight: f64,
    pub enabled: bool,
}

impl ConnectionGene {
    pub fn new(
        innovation: impl Into<Innovation>,
        source: impl Into<Innovation>,
        target: impl Into<Innovation>,
        weight: f64,
    ) -> Self {
        Self {
            innovation: innovation.into(),
            source: source.into(),
            target: target.into(),
            weight,
            enabled: true,
        }
    }

    pub fn disabled(mut self) -> Self {
        self.enabled = false;
        self
    }
}

/// A CPPN genome. Node and connection genes are kept sorted by innovation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome {
    pub id: String,
    #[serde(default)]
    pub parent_id: Option<String>,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub author: String,
    pub palette: Palette,
    pub nodes: Vec<NodeGene>,
    pub connections: Vec<ConnectionGene>,
}

/// A broken genome invariant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    #[error("node innovation {0} appears more than once")]
    DuplicateNodeInnovation(Innovation),
    #[error("connection innovation {0} appears more than once")]
    DuplicateConnectionInnovation(Innovation),
    #[error("expected {expected} node(s) of kind {kind:?}, found {found}")]
    KindCount {
        kind: NodeKind,
        expected: usize,
        found: usize,
    },
    #[error("input node {node} must use the identity activation")]
    NonIdentityInput { node: Innovation },
    #[error("connection {connection} references unknown node {node}")]
    UnknownEndpoint {
        connection: Innovation,
        node: Innovation,
    },
    #[error("connection {connection} targets input node {node}")]
    InputTarget {
        connection: Innovation,
        node: Innovation,
    },
    #[error("connection {connection} leaves output node {node}")]
    OutputSource {
        connection: Innovation,
        node: Innovation,
    },
    #[error("connections {first} and {second} share the pair ({from} -> {to})")]
    DuplicatePair {
        first: Innovation,
        second: Innovation,
        from: Innovation,
        to: Innovation,
    },
    #[error("connection {connection} has weight {weight} outside [-3, 3]")]
    WeightOutOfRange { connection: Innovation, weight: f64 },
    #[error("enabled connections form a cycle through nodes {nodes:?}")]
    Cycle { nodes: Vec<Innovation> },
    #[error("hidden node {node} is not on any input-to-output path")]
    OrphanHidden { node: Innovation },
}

impl Genome {
    /// Builds a genome, sorting genes into canonical order.
    pub fn new(
        id: impl Into<String>,
        palette: Palette,
        mut nodes: Vec<NodeGene>,
        mut connections: Vec<ConnectionGene>,
    ) -> Self {
        nodes.sort_by_key(|n| n.innovation);
        connections.sort_by_key(|c| c.innovation);
        Self {
            id: id.into(),
            parent_id: None,
            title: String::new(),
            author: String::new(),
            palette,
            nodes,
            connections,
        }
    }

    /// The fixed input and output nodes for `palette`, with no hidden nodes.
    pub fn io_nodes(palette: Palette) -> Vec<NodeGene> {
        NodeKind::INPUTS
            .iter()
            .chain(palette.outputs())
            .map(|&kind| {
                NodeGene::new(
                    kind.reserved_innovation().expect("io kind"),
                    kind,
                    Activation::Identity,
                )
            })
            .collect()
    }

    pub fn node(&self, id: Innovation) -> Option<&NodeGene> {
        self.nodes
            .binary_search_by_key(&id, |n| n.innovation)
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn connection(&self, id: Innovation) -> Option<&ConnectionGene> {
        self.connection_index(id).map(|i| &self.connections[i])
    }

    pub fn connection_index(&self, id: Innovation) -> Option<usize> {
        self.connections
            .binary_search_by_key(&id, |c| c.innovation)
            .ok()
    }

    pub fn node_of_kind(&self, kind: NodeKind) -> Option<&NodeGene> {
        self.nodes.iter().find(|n| n.kind == kind)
    }

    pub fn hidden_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Hidden)
            .count()
    }

    pub fn enabled_connection_count(&self) -> usize {
        self.connections.iter().filter(|c| c.enabled).count()
    }

    pub fn has_pair(&self, source: Innovation, target: Innovation) -> bool {
        self.connections
            .iter()
            .any(|c| c.source == source && c.target == target)
    }

    pub fn max_innovation(&self) -> Option<Innovation> {
        let n = self.nodes.iter().map(|n| n.innovation).max();
        let c = self.connections.iter().map(|c| c.innovation).max();
        n.max(c)
    }

    /// True when both genomes carry the same genes, ignoring id and metadata.
    pub fn same_genes(&self, other: &Genome) -> bool {
        self.palette == other.palette
            && self.nodes == other.nodes
            && self.connections == other.connections
    }

    /// Inserts a node gene, keeping canonical order.
    pub fn insert_node(&mut self, node: NodeGene) {
        let at = self
            .nodes
            .partition_point(|n| n.innovation < node.innovation);
        self.nodes.insert(at, node);
    }

    /// Inserts a connection gene, keeping canonical order.
    pub fn insert_connection(&mut self, conn: ConnectionGene) {
        let at = self
            .connections
            .partition_point(|c| c.innovation < conn.innovation);
        self.connections.insert(at, conn);
    }

    /// Whether `to` is reachable from `from` along enabled connections.
    pub fn enabled_path_exists(&self, from: Innovation, to: Innovation) -> bool {
        if from == to {
            return true;
        }
        let mut out: HashMap<Innovation, Vec<Innovation>> = HashMap::new();
        for c in self.connections.iter().filter(|c| c.enabled) {
            out.entry(c.source).or_default().push(c.target);
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

    /// Every violated invariant; empty when the genome is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        let mut seen = HashSet::new();
        for n in &self.nodes {
            if !seen.insert(n.innovation) {
                out.push(Violation::DuplicateNodeInnovation(n.innovation));
            }
            if n.kind.is_input() && n.activation != Activation::Identity {
                out.push(Violation::NonIdentityInput { node: n.innovation });
            }
        }
        let mut seen = HashSet::new();
        for c in &self.connections {
            if !seen.insert(c.innovation) {
                out.push(Violation::DuplicateConnectionInnovation(c.innovation));
            }
        }

        let mut counts: BTreeMap<NodeKind, usize> = BTreeMap::new();
        for n in &self.nodes {
            *counts.entry(n.kind).or_default() += 1;
        }
        let required = |kind: NodeKind| -> usize {
            if kind.is_input() || self.palette.outputs().contains(&kind) {
                1
            } else {
                0
            }
        };
        for kind in [
            NodeKind::InputX,
            NodeKind::InputY,
            NodeKind::InputD,
            NodeKind::InputBias,
            NodeKind::OutputIntensity,
            NodeKind::OutputHue,
            NodeKind::OutputSaturation,
        ] {
            let found = counts.get(&kind).copied().unwrap_or(0);
            let expected = required(kind);
            if found != expected {
                out.push(Violation::KindCount {
                    kind,
                    expected,
                    found,
                });
            }
        }

        let kinds: HashMap<Innovation, NodeKind> =
            self.nodes.iter().map(|n| (n.innovation, n.kind)).collect();
        let mut pairs: HashMap<(Innovation, Innovation), Innovation> = HashMap::new();
        let (lo, hi) = WEIGHT_BOUNDS;
        for c in &self.connections {
            for end in [c.source, c.target] {
                if !kinds.contains_key(&end) {
                    out.push(Violation::UnknownEndpoint {
                        connection: c.innovation,
                        node: end,
                    });
                }
            }
            if kinds.get(&c.target).is_some_and(|k| k.is_input()) {
                out.push(Violation::InputTarget {
                    connection: c.innovation,
                    node: c.target,
                });
            }
            if kinds.get(&c.source).is_some_and(|k| k.is_output()) {
                out.push(Violation::OutputSource {
                    connection: c.innovation,
                    node: c.source,
                });
            }
            if let Some(&first) = pairs.get(&(c.source, c.target)) {
                out.push(Violation::DuplicatePair {
                    first,
                    second: c.innovation,
                    from: c.source,
                    to: c.target,
                });
            } else {
                pairs.insert((c.source, c.target), c.innovation);
            }
            if !(lo..=hi).contains(&c.weight) {
                out.push(Violation::WeightOutOfRange {
                    connection: c.innovation,
                    weight: c.weight,
                });
            }
        }

        if let Err(nodes) = self.topological_order() {
            out.push(Violation::Cycle { nodes });
        }

        out.extend(
            self.orphan_hidden_nodes()
                .into_iter()
                .map(|node| Violation::OrphanHidden { node }),
        );
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Hidden nodes that are not both reachable from an input and able to
    /// reach an output, counting disabled connections too.
    pub fn orphan_hidden_nodes(&self) -> Vec<Innovation> {
        let mut fwd: HashMap<Innovation, Vec<Innovation>> = HashMap::new();
        let mut bwd: HashMap<Innovation, Vec<Innovation>> = HashMap::new();
        for c in &self.connections {
            fwd.entry(c.source).or_default().push(c.target);
            bwd.entry(c.target).or_default().push(c.source);
        }
        let flood = |starts: Vec<Innovation>, adj: &HashMap<Innovation, Vec<Innovation>>| {
            let mut seen: HashSet<Innovation> = starts.iter().copied().collect();
            let mut queue: VecDeque<Innovation> = starts.into();
            while let Some(u) = queue.pop_front() {
                for &v in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                    if seen.insert(v) {
                        queue.push_back(v);
                    }
                }
            }
            seen
        };
        let from_inputs = flood(
            self.nodes
                .iter()
                .filter(|n| n.kind.is_input())
                .map(|n| n.innovation)
                .collect(),
            &fwd,
        );
        let to_outputs = flood(
            self.nodes
                .iter()
                .filter(|n| n.kind.is_output())
                .map(|n| n.innovation)
                .collect(),
            &bwd,
        );
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Hidden)
            .map(|n| n.innovation)
            .filter(|id| !from_inputs.contains(id) || !to_outputs.contains(id))
            .collect()
    }

    /// Kahn order over enabled connections, ties broken by ascending
    /// innovation. On a cycle, returns the nodes that could not be ordered.
    pub fn topological_order(&self) -> Result<Vec<Innovation>, Vec<Innovation>> {
        let ids: BTreeSet<Innovation> = self.nodes.iter().map(|n| n.innovation).collect();
        let mut indeg: BTreeMap<Innovation, usize> = ids.iter().map(|&i| (i, 0)).collect();
        let mut out: HashMap<Innovation, Vec<Innovation>> = HashMap::new();
        for c in self.connections.iter().filter(|c| c.enabled) {
            if !ids.contains(&c.source) || !ids.contains(&c.target) {
                continue;
            }
            *indeg.get_mut(&c.target).expect("known") += 1;
            out.entry(c.source).or_default().push(c.target);
        }
        let mut ready: BTreeSet<Innovation> = indeg
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&i, _)| i)
            .collect();
        let mut order = Vec::with_capacity(ids.len());
        while let Some(u) = ready.pop_first() {
            order.push(u);
            for &v in out.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indeg.get_mut(&v).expect("known");
                *d -= 1;
                if *d == 0 {
                    ready.insert(v);
                }
            }
        }
        if order.len() == ids.len() {
            Ok(order)
        } else {
            let placed: HashSet<Innovation> = order.into_iter().collect();
            Err(ids.into_iter().filter(|i| !placed.contains(i)).collect())
        }
    }

    /// Canonical JSON: fixed key order, genes sorted by innovation, compact.
    pub fn to_canonical_json(&self) -> String {
        let mut g = self.clone();
        g.nodes.sort_by_key(|n| n.innovation);
        g.connections.sort_by_key(|c| c.innovation);
        serde_json::to_string(&g).expect("genome serializes")
    }

    /// Parses a genome document; gene order is normalized, invariants are not checked.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let mut g: Genome = serde_json::from_str(text)?;
        g.nodes.sort_by_key(|n| n.innovation);
        g.connections.sort_by_key(|c| c.innovation);
        Ok(g)
    }
}
