use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::genome::{Genome, Innovation};

/// Simple directed graph over nodes `0..n`: no self-loops, no duplicate edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    in_degree: Vec<usize>,
    out_degree: Vec<usize>,
}

impl DirectedGraph {
    pub fn new(n: usize, mut edges: Vec<(usize, usize)>) -> Result<Self, MetricsError> {
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(MetricsError::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        let mut in_degree = vec![0; n];
        let mut out_degree = vec![0; n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(MetricsError::NodeOutOfRange(u.max(v), n));
            }
            if u == v {
                return Err(MetricsError::SelfLoop(u));
            }
            out_degree[u] += 1;
            in_degree[v] += 1;
        }
        Ok(Self {
            n,
            edges,
            in_degree,
            out_degree,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(u, v)` meaning u → v, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn in_degree(&self) -> &[usize] {
        &self.in_degree
    }

    pub fn out_degree(&self) -> &[usize] {
        &self.out_degree
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u, v)).is_ok()
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            out[u].push(v);
        }
        out
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.n, self.edges.iter().map(|&(u, v)| (v, u)).collect())
            .expect("reversal keeps the graph simple")
    }
}

/// A genome's structural graph with the innovation id behind each index.
#[derive(Debug, Clone, PartialEq)]
pub struct GenomeGraph {
    pub graph: DirectedGraph,
    pub nodes: Vec<Innovation>,
}

/// All node genes become vertices (in innovation order); enabled connections
/// become edges.
pub fn genome_to_graph(genome: &Genome) -> GenomeGraph {
    let mut nodes: Vec<Innovation> = genome.nodes.iter().map(|n| n.innovation).collect();
    nodes.sort();
    let index = |id: Innovation| nodes.binary_search(&id).expect("endpoint is a node");
    let edges = genome
        .connections
        .iter()
        .filter(|c| c.enabled)
        .map(|c| (index(c.source), index(c.target)))
        .collect();
    GenomeGraph {
        graph: DirectedGraph::new(nodes.len(), edges).expect("valid genome gives a simple graph"),
        nodes,
    }
}

/// Module assignment with dense ids `0..k`, numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    assignment: Vec<usize>,
}

impl Partition {
    pub fn new(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Self { assignment }
    }

    pub fn single(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn module_count(&self) -> usize {
        self.assignment.iter().max().map_or(0, |m| m + 1)
    }

    pub fn module_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn modules(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.module_count()];
        for (i, &m) in self.assignment.iter().enumerate() {
            out[m].push(i);
        }
        out
    }
}
