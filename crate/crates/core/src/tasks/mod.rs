//! Task 1 (multi-directional tapping with depth) and Task 2 (tetrahedron
//! docking): layouts, sequencing, scoring and the per-trial log.

mod docking;
mod log;
mod selection;

pub use docking::{
    docking_error, is_docked, random_rotation, vertex_errors, DockingTrial, DOCKING_EDGE,
    DOCKING_TOLERANCE, SPAWN_RADIUS,
};
pub use log::{EventKind, TaskKind, TrialEvent, TrialLog};
pub use selection::{
    build_selection_layout, compute_id, diametric_visit_order, HighlightState, SelectionLayout,
    SelectionOutcome, SelectionRun, SphereHighlight, DEPTH_OFFSET, LAYOUT_HEIGHT, RING_COUNT,
    RING_DIAMETER, TARGET_WIDTH,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TaskError {
    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),
    #[error("index of difficulty needs positive amplitude and width, got {amplitude} and {width}")]
    InvalidIdInputs { amplitude: f64, width: f64 },
    #[error("visit order must be a permutation of 1..={0}")]
    InvalidVisitOrder(usize),
    #[error("vertex labels do not match")]
    MismatchedLabels,
    #[error("selection sequence already complete")]
    SequenceComplete,
    #[error("event {index} at t={time} precedes the previous event at t={previous}")]
    NonMonotoneTimestamps { index: usize, time: f64, previous: f64 },
    #[error("successful trial must have a positive {0}")]
    NonPositiveTime(&'static str),
    #[error("clicks ({clicks}) fewer than required for a successful selection")]
    TooFewClicks { clicks: u32 },
}
