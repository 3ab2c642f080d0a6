//! Dialect-specific diagram models built from the calculus: QueryVis (reading
//! arrows, dashed ¬∃ boxes, double-lined ∀ boxes) and Relational Diagrams
//! (nested shaded negation boxes).

mod build;
mod model;

pub use build::{
    adjacency, build_queryvis, build_relational_diagram, node_id, unreachable_nodes, BuildError,
    QUERYVIS_MAX_DEPTH,
};
pub use model::*;
