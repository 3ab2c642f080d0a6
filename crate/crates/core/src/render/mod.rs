//! Serializers for positioned diagrams: SVG, Graphviz DOT and the JSON
//! interchange document.

mod dot;
mod interchange;
mod style;
mod svg;

pub use dot::to_dot;
pub use interchange::{
    from_interchange, to_interchange, GroupDoc, InterchangeDocument, InterchangeError, NodeDoc,
    INTERCHANGE_VERSION,
};
pub use style::{StyleConfig, StyleError, STYLE_ENV};
pub use svg::to_svg;
