//! Layered layout: BFS layers from the output table, crossing reduction that
//! keeps group members contiguous, and integer coordinates in abstract units
//! (one unit is a character horizontally and a text row vertically).

mod order;

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{unreachable_nodes, Diagram, Dialect, EdgeTarget};

pub use order::{
    count_crossings, order_within_layers, Endpoint, LayerProblem, OrderResult, Ordering,
};

/// Horizontal space between layer columns.
pub const GUTTER: i64 = 6;
/// Vertical space between stacked boxes and between group bands.
pub const GAP: i64 = 1;
/// Space between a group border and its contents.
pub const PAD: i64 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("the join graph is disconnected ({}); QueryVis needs a connected query", .0.join(", "))]
    DisconnectedQuery(Vec<String>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: i64,
    pub y: i64,
    pub width: i64,
    pub height: i64,
}

impl Rect {
    pub fn right(&self) -> i64 {
        self.x + self.width
    }

    pub fn bottom(&self) -> i64 {
        self.y + self.height
    }

    /// `other` lies inside `self` with at least `margin` units on every side.
    pub fn contains_with_margin(&self, other: &Rect, margin: i64) -> bool {
        other.x - self.x >= margin
            && other.y - self.y >= margin
            && self.right() - other.right() >= margin
            && self.bottom() - other.bottom() >= margin
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.right()
            && other.x < self.right()
            && self.y < other.bottom()
            && other.y < self.bottom()
    }

    fn union(&self, other: &Rect) -> Rect {
        let x = self.x.min(other.x);
        let y = self.y.min(other.y);
        Rect {
            x,
            y,
            width: self.right().max(other.right()) - x,
            height: self.bottom().max(other.bottom()) - y,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeLayout {
    pub id: String,
    pub layer: usize,
    pub order: usize,
    pub rect: Rect,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupLayout {
    pub id: String,
    pub rect: Rect,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionedDiagram {
    pub diagram: Diagram,
    /// Parallel to `diagram.nodes`.
    pub nodes: Vec<NodeLayout>,
    /// Parallel to `diagram.groups`.
    pub groups: Vec<GroupLayout>,
    pub width: i64,
    pub height: i64,
    pub crossings: usize,
}

impl PositionedDiagram {
    pub fn node(&self, id: &str) -> Option<&NodeLayout> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn group(&self, id: &str) -> Option<&GroupLayout> {
        self.groups.iter().find(|g| g.id == id)
    }
}

/// Layer of every node (parallel to `d.nodes`): the output table is alone in
/// layer 0 and every other node sits at its BFS distance from it over output
/// and join edges, so each edge joins equal or adjacent layers. Components
/// not reachable from the output table (Relational Diagrams only) are laid
/// out in later bands, each starting one layer past the previous maximum.
pub fn assign_layers(d: &Diagram) -> Result<Vec<usize>, LayoutError> {
    if d.dialect == Dialect::QueryVis {
        let unreachable = unreachable_nodes(d);
        if !unreachable.is_empty() {
            return Err(LayoutError::DisconnectedQuery(unreachable));
        }
    }
    let index: BTreeMap<&str, usize> = d
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id.as_str(), i))
        .collect();
    let mut adj = vec![Vec::new(); d.nodes.len()];
    for e in &d.edges {
        if let (a, Some(b)) = d.edge_nodes(e) {
            let (a, b) = (index[a], index[b]);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let out = index["select"];
    let mut layer: Vec<Option<usize>> = vec![None; d.nodes.len()];
    let mut start = 0;
    let mut seeds = vec![out];
    seeds.extend((0..d.nodes.len()).filter(|&i| i != out));
    for s in seeds {
        if layer[s].is_some() {
            continue;
        }
        layer[s] = Some(start);
        let mut queue = VecDeque::from([s]);
        let mut max = start;
        while let Some(n) = queue.pop_front() {
            let l = layer[n].unwrap();
            max = max.max(l);
            for &m in &adj[n] {
                if layer[m].is_none() {
                    layer[m] = Some(l + 1);
                    queue.push_back(m);
                }
            }
        }
        start = max + 1;
    }
    Ok(layer.into_iter().map(|l| l.unwrap()).collect())
}

/// Node widths and heights in abstract units: two units wider than the
/// longest text line, one row for the title plus one per attribute.
pub fn node_size(d: &Diagram, i: usize) -> (i64, i64) {
    let n = &d.nodes[i];
    let longest = (0..n.attr_rows.len())
        .map(|r| d.row_text(&n.id, r).chars().count())
        .chain([n.title.chars().count()])
        .max()
        .unwrap_or(0);
    (longest as i64 + 2, 1 + n.attr_rows.len() as i64)
}

/// Builds the ordering problem for a layered diagram. Clusters are the
/// groups in diagram order, shifted by one; cluster 0 is the root.
pub fn layer_problem(d: &Diagram, layers: &[usize]) -> LayerProblem {
    let index: BTreeMap<&str, usize> = d
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id.as_str(), i))
        .collect();
    let cluster_index: BTreeMap<&str, usize> = d
        .groups
        .iter()
        .enumerate()
        .map(|(i, g)| (g.id.as_str(), i + 1))
        .collect();
    let mut parent = vec![None];
    parent.extend(
        d.groups
            .iter()
            .map(|g| Some(g.parent.as_deref().map_or(0, |p| cluster_index[p]))),
    );
    let cluster = d
        .nodes
        .iter()
        .map(|n| n.group.as_deref().map_or(0, |g| cluster_index[g]))
        .collect();
    let tie = d
        .nodes
        .iter()
        .map(|n| d.span_map.get(&n.id).map_or(0, |s| s.start))
        .collect();
    let edges = d
        .edges
        .iter()
        .filter_map(|e| match &e.to {
            EdgeTarget::Port(p) => Some((
                Endpoint {
                    node: index[e.from.node.as_str()],
                    row: e.from.row,
                },
                Endpoint {
                    node: index[p.node.as_str()],
                    row: p.row,
                },
            )),
            EdgeTarget::Constant(_) => None,
        })
        .collect();
    LayerProblem {
        layer: layers.to_vec(),
        cluster,
        parent,
        tie,
        edges,
    }
}

/// Full layout: layers, ordering, coordinates.
pub fn layout(d: &Diagram) -> Result<PositionedDiagram, LayoutError> {
    let layers = assign_layers(d)?;
    let problem = layer_problem(d, &layers);
    let ordered = order_within_layers(&problem);
    Ok(assign_coordinates(d, &problem, &ordered))
}

/// Columns hold layers left to right; within a column boxes are stacked in
/// order. Each group owns a horizontal band spanning all columns: its own
/// members on top, child groups' bands below, padded on every side. Bands of
/// unrelated groups never overlap, so a group rectangle holds exactly its
/// members and descendants.
pub fn assign_coordinates(d: &Diagram, p: &LayerProblem, r: &OrderResult) -> PositionedDiagram {
    let n = d.nodes.len();
    let sizes: Vec<(i64, i64)> = (0..n).map(|i| node_size(d, i)).collect();
    let nl = p.layer_count();
    let mut col_w = vec![0i64; nl];
    for i in 0..n {
        col_w[p.layer[i]] = col_w[p.layer[i]].max(sizes[i].0);
    }
    let mut col_x = vec![0i64; nl];
    for l in 1..nl {
        col_x[l] = col_x[l - 1] + col_w[l - 1] + GUTTER;
    }

    let o = &r.ordering;
    let mut rects = vec![Rect::default(); n];
    let mut bands = vec![(0i64, 0i64); p.parent.len()];
    place(0, 0, o, &sizes, &col_x, &mut rects, &mut bands);

    // Group x-extents bottom-up: clusters are created parent-first, so a
    // reverse pass sees every child before its parent.
    let mut extent: Vec<Option<Rect>> = vec![None; p.parent.len()];
    for (i, rect) in rects.iter().enumerate() {
        let c = p.cluster[i];
        extent[c] = Some(extent[c].map_or(*rect, |e| e.union(rect)));
    }
    let mut group_rects = vec![Rect::default(); p.parent.len()];
    for c in (1..p.parent.len()).rev() {
        let inner = extent[c].unwrap_or(Rect {
            x: 0,
            y: bands[c].0 + PAD,
            width: 0,
            height: 0,
        });
        let rect = Rect {
            x: inner.x - PAD,
            y: bands[c].0,
            width: inner.width + 2 * PAD,
            height: bands[c].1 - bands[c].0,
        };
        group_rects[c] = rect;
        let parent = p.parent[c].expect("non-root cluster");
        extent[parent] = Some(extent[parent].map_or(rect, |e| e.union(&rect)));
    }

    let min_x = group_rects[1..]
        .iter()
        .map(|g| g.x)
        .chain(rects.iter().map(|r| r.x))
        .min()
        .unwrap_or(0)
        .min(0);
    for r in rects.iter_mut().chain(group_rects.iter_mut()) {
        r.x -= min_x;
    }
    let all = rects.iter().chain(group_rects[1..].iter());
    let width = all.clone().map(|r| r.right()).max().unwrap_or(0);
    let height = all.map(|r| r.bottom()).max().unwrap_or(0);

    let layers = o.layers();
    let mut order = vec![0; n];
    for seq in &layers {
        for (i, &node) in seq.iter().enumerate() {
            order[node] = i;
        }
    }
    PositionedDiagram {
        diagram: d.clone(),
        nodes: (0..n)
            .map(|i| NodeLayout {
                id: d.nodes[i].id.clone(),
                layer: p.layer[i],
                order: order[i],
                rect: rects[i],
            })
            .collect(),
        groups: d
            .groups
            .iter()
            .enumerate()
            .map(|(i, g)| GroupLayout {
                id: g.id.clone(),
                rect: group_rects[i + 1],
            })
            .collect(),
        width,
        height,
        crossings: r.crossings,
    }
}

/// Lays out cluster `c` starting at `top`; returns its bottom edge.
#[allow(clippy::too_many_arguments)]
fn place(
    c: usize,
    top: i64,
    o: &Ordering,
    sizes: &[(i64, i64)],
    col_x: &[i64],
    rects: &mut [Rect],
    bands: &mut [(i64, i64)],
) -> i64 {
    let pad = if c == 0 { 0 } else { PAD };
    let y0 = top + pad;
    let mut cur = y0;
    for (l, members) in o.members[c].iter().enumerate() {
        let mut y = y0;
        for &n in members {
            rects[n] = Rect {
                x: col_x[l],
                y,
                width: sizes[n].0,
                height: sizes[n].1,
            };
            y += sizes[n].1 + GAP;
            cur = cur.max(y - GAP);
        }
    }
    for &k in &o.child_order[c] {
        if cur > y0 {
            cur += GAP;
        }
        cur = place(k, cur, o, sizes, col_x, rects, bands);
    }
    let bottom = cur + pad;
    bands[c] = (top, bottom);
    bottom
}
