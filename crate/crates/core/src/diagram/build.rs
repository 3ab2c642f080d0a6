use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::calculus::{
    expand_forall, forall_transform, BlockKind, CalculusQuery, QuantifierBlock, TableVarId, Term,
};
use crate::pattern::canonical_var_order;
use crate::sql::CompOp;

use super::model::*;

/// Deepest nesting QueryVis can show unambiguously.
pub const QUERYVIS_MAX_DEPTH: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error(
        "nesting depth {depth} exceeds {QUERYVIS_MAX_DEPTH}, the deepest QueryVis reads \
         unambiguously; use the relational-diagrams dialect"
    )]
    DepthExceeded { depth: usize },
    #[error(
        "the join graph is disconnected ({} not reachable from the output table); \
         use the relational-diagrams dialect", .unreachable.join(", ")
    )]
    DisconnectedQuery { unreachable: Vec<String> },
}

pub fn build_queryvis(q: &CalculusQuery, apply_forall: bool) -> Result<Diagram, BuildError> {
    let depth = q.nesting_depth();
    if depth > QUERYVIS_MAX_DEPTH {
        return Err(BuildError::DepthExceeded { depth });
    }
    let q = if apply_forall {
        forall_transform(q)
    } else {
        q.clone()
    };
    let mut d = base(&q, Dialect::QueryVis, |kind| match kind {
        BlockKind::NotExists => Some(GroupStyle::NotExistsDashed),
        BlockKind::ForallImplies => Some(GroupStyle::ForallDouble),
        _ => None,
    });
    let unreachable = unreachable_nodes(&d);
    if !unreachable.is_empty() {
        return Err(BuildError::DisconnectedQuery { unreachable });
    }
    if depth > 0 {
        add_arrows(&q, &mut d);
    }
    Ok(d)
}

/// Never fails: any depth and disconnected join graphs are allowed.
pub fn build_relational_diagram(q: &CalculusQuery) -> Diagram {
    base(
        &expand_forall(q),
        Dialect::RelationalDiagrams,
        |kind| match kind {
            BlockKind::NotExists => Some(GroupStyle::NegationSolidShaded),
            _ => None,
        },
    )
}

pub fn node_id(v: TableVarId) -> String {
    format!("t{}", v.0)
}

fn base(
    q: &CalculusQuery,
    dialect: Dialect,
    style: impl Fn(BlockKind) -> Option<GroupStyle>,
) -> Diagram {
    let mut d = Diagram {
        dialect,
        nodes: vec![TableBox {
            id: "select".into(),
            title: "SELECT".into(),
            role: Role::Output,
            attr_rows: q.outputs.iter().map(|o| o.name.clone()).collect(),
            group: None,
            depth: 0,
        }],
        edges: Vec::new(),
        groups: Vec::new(),
        arrows: Vec::new(),
        span_map: BTreeMap::new(),
    };
    d.span_map.insert("select".into(), q.select_span);

    fn walk(
        b: &QuantifierBlock,
        current: Option<String>,
        d: &mut Diagram,
        style: &dyn Fn(BlockKind) -> Option<GroupStyle>,
        vars: &mut Vec<(TableVarId, TableBox)>,
    ) {
        let group = match style(b.kind) {
            Some(s) => {
                let id = format!("g{}", b.id.0);
                d.groups.push(GroupBox {
                    id: id.clone(),
                    style: s,
                    members: b.table_vars.iter().map(|v| node_id(v.id)).collect(),
                    parent: current.clone(),
                    depth: b.depth,
                    shade: (s == GroupStyle::NegationSolidShaded).then_some(b.depth % 2),
                });
                d.span_map.insert(id.clone(), b.span);
                Some(id)
            }
            None => {
                // Unboxed blocks hand their variables to the enclosing group.
                if let Some(g) = current.as_ref() {
                    let g = d
                        .groups
                        .iter_mut()
                        .find(|x| &x.id == g)
                        .expect("group exists");
                    g.members.extend(b.table_vars.iter().map(|v| node_id(v.id)));
                }
                current
            }
        };
        for v in &b.table_vars {
            vars.push((
                v.id,
                TableBox {
                    id: node_id(v.id),
                    title: v.relation.clone(),
                    role: Role::Input,
                    attr_rows: v.referenced_attrs.clone(),
                    group: group.clone(),
                    depth: b.depth,
                },
            ));
            d.span_map.insert(node_id(v.id), v.origin_span);
        }
        for c in &b.children {
            walk(c, group.clone(), d, style, vars);
        }
    }
    let mut vars = Vec::new();
    walk(&q.root, None, &mut d, &style, &mut vars);
    vars.sort_by_key(|(id, _)| *id);
    d.nodes.extend(vars.into_iter().map(|(_, n)| n));

    let row = |d: &Diagram, v: TableVarId, attr: &str| -> usize {
        d.node(&node_id(v))
            .and_then(|n| n.attr_rows.iter().position(|a| a == attr))
            .expect("referenced attribute has a row")
    };
    for (i, o) in q.outputs.iter().enumerate() {
        let id = format!("o{i}");
        let to = Port {
            node: node_id(o.source.var),
            row: row(&d, o.source.var, &o.source.attr),
        };
        d.edges.push(PredicateEdge {
            id: id.clone(),
            kind: EdgeKind::Output,
            from: Port {
                node: "select".into(),
                row: i,
            },
            to: EdgeTarget::Port(to),
            op_label: None,
        });
        d.span_map.insert(id, o.span);
    }
    let mut preds = q.predicates();
    preds.sort_by_key(|p| p.id);
    for p in preds {
        let id = format!("p{}", p.id.0);
        let from = Port {
            node: node_id(p.left.var),
            row: row(&d, p.left.var, &p.left.attr),
        };
        let (kind, to) = match &p.right {
            Term::Attr(a) => (
                EdgeKind::Join,
                EdgeTarget::Port(Port {
                    node: node_id(a.var),
                    row: row(&d, a.var, &a.attr),
                }),
            ),
            Term::Const(c) => (EdgeKind::Selection, EdgeTarget::Constant(c.to_string())),
        };
        d.edges.push(PredicateEdge {
            id: id.clone(),
            kind,
            from,
            to,
            op_label: (p.op != CompOp::Eq).then(|| p.op.as_str().to_string()),
        });
        d.span_map.insert(id, p.span);
    }
    d
}

/// Reading order: SELECT to the root block's anchor, then each block's anchor
/// to each child block's anchor. A block's anchor is its first table variable
/// in canonical order.
fn add_arrows(q: &CalculusQuery, d: &mut Diagram) {
    let order = canonical_var_order(q);
    let rank: BTreeMap<TableVarId, usize> =
        order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let anchor = |b: &QuantifierBlock| -> String {
        let v = b
            .table_vars
            .iter()
            .min_by_key(|v| rank.get(&v.id).copied().unwrap_or(usize::MAX))
            .expect("every block has a table variable");
        node_id(v.id)
    };
    let mut arrows = vec![("select".to_string(), anchor(&q.root), q.select_span)];
    q.root.walk(&mut |b| {
        for c in &b.children {
            arrows.push((anchor(b), anchor(c), c.span));
        }
    });
    for (k, (from, to, span)) in arrows.into_iter().enumerate() {
        let id = format!("a{k}");
        d.span_map.insert(id.clone(), span);
        d.arrows.push(ReadingArrow { id, from, to });
    }
}

/// Node ids not connected to the output table by any edge path.
pub fn unreachable_nodes(d: &Diagram) -> Vec<String> {
    let adj = adjacency(d);
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from(["select"]);
    seen.insert("select");
    while let Some(n) = queue.pop_front() {
        for m in adj.get(n).into_iter().flatten() {
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    d.nodes
        .iter()
        .filter(|n| !seen.contains(n.id.as_str()))
        .map(|n| n.id.clone())
        .collect()
}

/// Undirected node adjacency induced by output and join edges.
pub fn adjacency(d: &Diagram) -> BTreeMap<&str, Vec<&str>> {
    let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in &d.edges {
        if let (a, Some(b)) = d.edge_nodes(e) {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
    }
    for v in adj.values_mut() {
        v.sort();
        v.dedup();
    }
    adj
}
