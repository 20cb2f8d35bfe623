//! Interactive evolution of CPPN images and the structural analysis toolkit
//! that goes with it.
//!
//! * [`cppn`]: evaluate and render genomes, including per-node views.
//! * [`neat`]: mutation, crossover, seed genomes and session stepping.
//! * [`probe`]: single-connection weight sweeps, labels and annotated exports.
//! * [`metrics`]: directed modularity, reaching-centrality hierarchy, null models.
//! * [`stats`]: descendant fitness, Wilcoxon, Pearson, bootstrap and corpus reports.
//! * [`store`]: append-only archive of published genomes and their lineage.

pub mod activation;
pub mod cppn;
pub mod genome;
pub mod image;
pub mod metrics;
pub mod neat;
pub mod probe;
pub mod stats;
pub mod store;

pub use activation::{Activation, ActivationParams};
pub use cppn::{evaluate, render, render_node, CompiledCppn, CppnConfig, CppnError, Outputs};
pub use genome::{ConnectionGene, Genome, Innovation, NodeGene, NodeKind, Palette, Violation};
pub use image::ImageBuffer;
