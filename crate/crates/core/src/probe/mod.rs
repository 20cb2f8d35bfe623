//! Single-connection weight sweeps, connection labels and annotated exports.

mod export;
mod labels;
mod sweep;

pub use export::{annotate_export, decomposition, AnnotatedExport, Decomposition, LabelGroup};
pub use labels::{node_label, Label, LabelStore, Rgb};
pub use sweep::{
    impact_from, impact_map, sweep, Frame, ImpactMap, ImpactSummary, SweepResult, SweepSpec,
    DEFAULT_STEP, DEFAULT_THRESHOLD, FINE_STEP, LOCAL_WINDOW,
};

use crate::cppn::CppnError;
use crate::genome::Innovation;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProbeError {
    #[error("unknown connection {0}")]
    UnknownConnection(Innovation),
    #[error("connection {0} is disabled")]
    DisabledConnection(Innovation),
    #[error("unknown node {0}")]
    UnknownNode(Innovation),
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error("invalid color {0:?}, expected #rrggbb")]
    InvalidColor(String),
    #[error("label name is empty")]
    EmptyLabel,
    #[error("label store belongs to {store}, not {genome}")]
    GenomeMismatch { store: String, genome: String },
    #[error(transparent)]
    Cppn(#[from] CppnError),
}
