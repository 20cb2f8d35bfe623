//! NEAT-style variation for CPPN genomes.

mod crossover;
mod mutation;
mod registry;
mod session;

pub use crossover::{crossover, crossover_detailed, CrossoverOutcome};
pub use mutation::{
    add_node_on, fresh_genome_id, mutate, mutate_add_connection, mutate_add_node, mutate_weights,
    random_weight, replacement_weight, seed_genome, AddConnection, AddNode, MutationConfig,
    ADD_CONNECTION_ATTEMPTS,
};
pub use registry::{InnovationRegistry, FIRST_FREE_INNOVATION};
pub use session::{branch, next_generation, Origin, Session, DEFAULT_POPULATION, POPULATION_RANGE};

use crate::genome::{Innovation, Violation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NeatError {
    #[error("parents have different palettes")]
    PaletteMismatch,
    #[error("no genomes selected")]
    EmptySelection,
    #[error("selected index {index} out of range for population of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("population size {0} outside 4..=64")]
    PopulationSize(usize),
    #[error("invalid mutation config: {0}")]
    InvalidConfig(String),
    #[error("unknown connection {0}")]
    UnknownConnection(Innovation),
    #[error("connection {0} is disabled")]
    DisabledConnection(Innovation),
    #[error("invalid genome: {0:?}")]
    InvalidGenome(Vec<Violation>),
}
