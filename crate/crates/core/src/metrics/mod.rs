//! Structural metrics over genome graphs.

mod graph;
mod hierarchy;
mod modularity;
mod nulls;

pub use graph::{genome_to_graph, DirectedGraph, GenomeGraph, Partition};
pub use hierarchy::{grc_hierarchy, local_reaching_centrality};
pub use modularity::{
    brute_force_partition, modularity_q, optimal_partition, BRUTE_FORCE_MAX_NODES,
};
pub use nulls::{
    analyze, growth_plan, metric_value, module_assignments, null_anchor, null_models, residual,
    GenomeMetrics, Metric, ModuleAssignment, NullModelBatch, NullModelConfig, ResidualScore,
    NULL_MODEL_RETRIES,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("graph needs at least 2 nodes, has {0}")]
    TooSmall(usize),
    #[error("exhaustive search is limited to 12 nodes, graph has {0}")]
    TooLarge(usize),
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("node {0} out of range for {1} nodes")]
    NodeOutOfRange(usize, usize),
    #[error("partition covers {partition} nodes, graph has {nodes}")]
    PartitionSize { partition: usize, nodes: usize },
    #[error("null models infeasible: {0}")]
    Infeasible(String),
    #[error("add-connection saturated while building a null model")]
    Saturated,
    #[error("null-model batch was built for {batch}, not {source_id}")]
    BatchMismatch { batch: String, source_id: String },
    #[error("null-model batch is empty")]
    EmptyBatch,
}
