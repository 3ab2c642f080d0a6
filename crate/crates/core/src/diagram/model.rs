use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::span::SourceSpan;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dialect {
    #[serde(rename = "queryvis")]
    QueryVis,
    #[serde(rename = "relational-diagrams")]
    RelationalDiagrams,
}

impl Dialect {
    pub fn as_str(self) -> &'static str {
        match self {
            Dialect::QueryVis => "queryvis",
            Dialect::RelationalDiagrams => "relational-diagrams",
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Output,
    Input,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TableBox {
    pub id: String,
    /// Relation name, or `SELECT` for the output table.
    pub title: String,
    pub role: Role,
    pub attr_rows: Vec<String>,
    pub group: Option<String>,
    /// Depth of the quantifier block the table variable belongs to.
    pub depth: usize,
}

/// An attribute row of a table box.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Port {
    pub node: String,
    pub row: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeTarget {
    Port(Port),
    /// Rendered next to the source row rather than as a separate node.
    Constant(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// SELECT row to the attribute it is bound to.
    Output,
    /// Comparison between two attributes.
    Join,
    /// Comparison between an attribute and a constant.
    Selection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PredicateEdge {
    pub id: String,
    pub kind: EdgeKind,
    pub from: Port,
    pub to: EdgeTarget,
    /// Comparison operator; `None` stands for `=`.
    pub op_label: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupStyle {
    NotExistsDashed,
    ForallDouble,
    NegationSolidShaded,
}

impl GroupStyle {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupStyle::NotExistsDashed => "not-exists-dashed",
            GroupStyle::ForallDouble => "forall-double",
            GroupStyle::NegationSolidShaded => "negation-solid-shaded",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroupBox {
    pub id: String,
    pub style: GroupStyle,
    /// Nodes directly inside this group (not inside a child group).
    pub members: Vec<String>,
    pub parent: Option<String>,
    pub depth: usize,
    /// Tint index for shaded negation boxes: depth mod 2.
    pub shade: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadingArrow {
    pub id: String,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagram {
    pub dialect: Dialect,
    pub nodes: Vec<TableBox>,
    pub edges: Vec<PredicateEdge>,
    pub groups: Vec<GroupBox>,
    pub arrows: Vec<ReadingArrow>,
    /// Element id to the source text it came from.
    pub span_map: BTreeMap<String, SourceSpan>,
}

/// Counts returned by [`diagram_stats`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagramStats {
    pub nodes: usize,
    pub edges: usize,
    pub groups: usize,
    pub arrows: usize,
    pub max_depth: usize,
}

impl DiagramStats {
    /// `(nodes, edges, groups, arrows, max depth)`
    pub fn as_tuple(self) -> (usize, usize, usize, usize, usize) {
        (
            self.nodes,
            self.edges,
            self.groups,
            self.arrows,
            self.max_depth,
        )
    }
}

pub fn diagram_stats(d: &Diagram) -> DiagramStats {
    DiagramStats {
        nodes: d.nodes.len(),
        edges: d.edges.len(),
        groups: d.groups.len(),
        arrows: d.arrows.len(),
        max_depth: d.nodes.iter().map(|n| n.depth).max().unwrap_or(0),
    }
}

impl Diagram {
    pub fn node(&self, id: &str) -> Option<&TableBox> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn group(&self, id: &str) -> Option<&GroupBox> {
        self.groups.iter().find(|g| g.id == id)
    }

    pub fn output_node(&self) -> &TableBox {
        self.nodes
            .iter()
            .find(|n| n.role == Role::Output)
            .expect("diagram has an output table")
    }

    /// Text of an attribute row, including any constant comparisons on it,
    /// e.g. `drink = 'ale'` or `age > 30`.
    pub fn row_text(&self, node: &str, row: usize) -> String {
        let Some(n) = self.node(node) else {
            return String::new();
        };
        let mut text = n.attr_rows.get(row).cloned().unwrap_or_default();
        for e in &self.edges {
            if let EdgeTarget::Constant(c) = &e.to {
                if e.from.node == node && e.from.row == row {
                    let op = e.op_label.as_deref().unwrap_or("=");
                    text.push_str(&format!(" {op} {c}"));
                }
            }
        }
        text
    }

    /// Groups from `group` up to the outermost one, innermost first.
    pub fn group_chain(&self, group: Option<&str>) -> Vec<&GroupBox> {
        let mut out = Vec::new();
        let mut cur = group.and_then(|g| self.group(g));
        while let Some(g) = cur {
            out.push(g);
            cur = g.parent.as_deref().and_then(|p| self.group(p));
        }
        out
    }

    /// Edge endpoints as node ids; constants yield `None` for the target.
    pub fn edge_nodes<'a>(&'a self, e: &'a PredicateEdge) -> (&'a str, Option<&'a str>) {
        let to = match &e.to {
            EdgeTarget::Port(p) => Some(p.node.as_str()),
            EdgeTarget::Constant(_) => None,
        };
        (e.from.node.as_str(), to)
    }
}
