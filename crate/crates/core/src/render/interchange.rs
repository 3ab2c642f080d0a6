//! Versioned JSON interchange document. Field names are described by
//! `docs/diagram-schema.json`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{
    Diagram, Dialect, GroupBox, GroupStyle, PredicateEdge, ReadingArrow, Role, TableBox,
};
use crate::layout::{GroupLayout, NodeLayout, PositionedDiagram, Rect};
use crate::span::SourceSpan;

pub const INTERCHANGE_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum InterchangeError {
    #[error("unsupported interchange version {found:?} (expected \"{INTERCHANGE_VERSION}\")")]
    Version { found: Option<String> },
    #[error("invalid interchange document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid interchange document: {0}")]
    Structure(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InterchangeDocument {
    pub version: String,
    pub dialect: Dialect,
    pub width: i64,
    pub height: i64,
    pub crossings: usize,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<PredicateEdge>,
    pub groups: Vec<GroupDoc>,
    pub arrows: Vec<ReadingArrow>,
    pub span_map: BTreeMap<String, SourceSpan>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    pub title: String,
    pub role: Role,
    pub attr_rows: Vec<String>,
    pub group: Option<String>,
    pub depth: usize,
    pub layer: usize,
    pub order: usize,
    pub rect: Rect,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GroupDoc {
    pub id: String,
    pub style: GroupStyle,
    pub members: Vec<String>,
    pub parent: Option<String>,
    pub depth: usize,
    pub shade: Option<usize>,
    pub rect: Rect,
}

impl From<&PositionedDiagram> for InterchangeDocument {
    fn from(pd: &PositionedDiagram) -> Self {
        let d = &pd.diagram;
        InterchangeDocument {
            version: INTERCHANGE_VERSION.into(),
            dialect: d.dialect,
            width: pd.width,
            height: pd.height,
            crossings: pd.crossings,
            nodes: d
                .nodes
                .iter()
                .zip(&pd.nodes)
                .map(|(n, l)| NodeDoc {
                    id: n.id.clone(),
                    title: n.title.clone(),
                    role: n.role,
                    attr_rows: n.attr_rows.clone(),
                    group: n.group.clone(),
                    depth: n.depth,
                    layer: l.layer,
                    order: l.order,
                    rect: l.rect,
                })
                .collect(),
            edges: d.edges.clone(),
            groups: d
                .groups
                .iter()
                .zip(&pd.groups)
                .map(|(g, l)| GroupDoc {
                    id: g.id.clone(),
                    style: g.style,
                    members: g.members.clone(),
                    parent: g.parent.clone(),
                    depth: g.depth,
                    shade: g.shade,
                    rect: l.rect,
                })
                .collect(),
            arrows: d.arrows.clone(),
            span_map: d.span_map.clone(),
        }
    }
}

impl InterchangeDocument {
    pub fn into_positioned(self) -> Result<PositionedDiagram, InterchangeError> {
        if self.version != INTERCHANGE_VERSION {
            return Err(InterchangeError::Version {
                found: Some(self.version),
            });
        }
        let diagram = Diagram {
            dialect: self.dialect,
            nodes: self
                .nodes
                .iter()
                .map(|n| TableBox {
                    id: n.id.clone(),
                    title: n.title.clone(),
                    role: n.role,
                    attr_rows: n.attr_rows.clone(),
                    group: n.group.clone(),
                    depth: n.depth,
                })
                .collect(),
            edges: self.edges,
            groups: self
                .groups
                .iter()
                .map(|g| GroupBox {
                    id: g.id.clone(),
                    style: g.style,
                    members: g.members.clone(),
                    parent: g.parent.clone(),
                    depth: g.depth,
                    shade: g.shade,
                })
                .collect(),
            arrows: self.arrows,
            span_map: self.span_map,
        };
        if diagram
            .nodes
            .iter()
            .filter(|n| n.role == Role::Output)
            .count()
            != 1
        {
            return Err(InterchangeError::Structure(
                "exactly one node must have role \"output\"".into(),
            ));
        }
        Ok(PositionedDiagram {
            diagram,
            nodes: self
                .nodes
                .into_iter()
                .map(|n| NodeLayout {
                    id: n.id,
                    layer: n.layer,
                    order: n.order,
                    rect: n.rect,
                })
                .collect(),
            groups: self
                .groups
                .into_iter()
                .map(|g| GroupLayout {
                    id: g.id,
                    rect: g.rect,
                })
                .collect(),
            width: self.width,
            height: self.height,
            crossings: self.crossings,
        })
    }
}

pub fn to_interchange(pd: &PositionedDiagram) -> String {
    let mut s = serde_json::to_string_pretty(&InterchangeDocument::from(pd))
        .expect("interchange document serializes");
    s.push('\n');
    s
}

pub fn from_interchange(text: &str) -> Result<PositionedDiagram, InterchangeError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("version").and_then(|v| v.as_str()) {
        Some(INTERCHANGE_VERSION) => {}
        other => {
            return Err(InterchangeError::Version {
                found: other.map(str::to_string),
            })
        }
    }
    serde_json::from_value::<InterchangeDocument>(value)?.into_positioned()
}
