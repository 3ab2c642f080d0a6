//! Labeled query graph and its canonical labeling.

use std::collections::BTreeMap;

use crate::calculus::{CalculusQuery, QuantifierBlock, Term};
use crate::sql::CompOp;

/// Directed graph with string labels on nodes and edges. Parallel edges are
/// allowed (a predicate may mention the same variable twice).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabeledGraph {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize, String)>,
}

pub(crate) struct QueryGraph {
    pub graph: LabeledGraph,
    /// Node index of every table variable, by `TableVarId`.
    pub var_node: BTreeMap<usize, usize>,
}

impl LabeledGraph {
    fn add_node(&mut self, label: String) -> usize {
        self.labels.push(label);
        self.labels.len() - 1
    }

    fn add_edge(&mut self, from: usize, to: usize, label: impl Into<String>) {
        self.edges.push((from, to, label.into()));
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Relabels nodes so that node `i` becomes `perm[i]`; edges are sorted.
    pub fn permuted(&self, perm: &[usize]) -> LabeledGraph {
        let mut labels = vec![String::new(); self.labels.len()];
        for (i, l) in self.labels.iter().enumerate() {
            labels[perm[i]] = l.clone();
        }
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|(a, b, l)| (perm[*a], perm[*b], l.clone()))
            .collect();
        edges.sort();
        LabeledGraph { labels, edges }
    }
}

/// Predicate operator as seen by the pattern graph: `>`/`>=` between two
/// attributes are flipped to `<`/`<=` so that `a > b` and `b < a` coincide.
pub(crate) fn normalized(op: CompOp, right_is_attr: bool) -> (CompOp, bool) {
    match op {
        CompOp::Gt | CompOp::Ge if right_is_attr => (op.flipped(), true),
        _ => (op, false),
    }
}

pub(crate) fn build(q: &CalculusQuery, abstract_constants: bool) -> QueryGraph {
    let mut g = LabeledGraph::default();
    let mut var_node = BTreeMap::new();

    fn block<'q>(
        b: &'q QuantifierBlock,
        g: &mut LabeledGraph,
        var_node: &mut BTreeMap<usize, usize>,
        preds: &mut Vec<(usize, &'q QuantifierBlock)>,
    ) -> usize {
        let id = g.add_node(format!("B:{}:{}", b.kind, b.depth));
        for v in &b.table_vars {
            let n = g.add_node(format!("V:{}", v.relation));
            var_node.insert(v.id.0, n);
            g.add_edge(id, n, "var");
        }
        preds.push((id, b));
        for c in &b.children {
            let cn = block(c, g, var_node, preds);
            g.add_edge(id, cn, "child");
        }
        id
    }

    let mut blocks = Vec::new();
    block(&q.root, &mut g, &mut var_node, &mut blocks);
    // Predicates are added once all variables have nodes.
    for (bn, b) in blocks {
        for p in &b.predicates {
            let right_attr = matches!(p.right, Term::Attr(_));
            let (op, swap) = normalized(p.op, right_attr);
            let label = match &p.right {
                Term::Const(_) if abstract_constants => format!("P:{op}:c=?"),
                Term::Const(c) => format!("P:{op}:c={c}"),
                Term::Attr(_) => format!("P:{op}"),
            };
            let n = g.add_node(label);
            g.add_edge(bn, n, "pred");
            let (lhs, rhs) = if op.is_symmetric() {
                ("arg", "arg")
            } else {
                ("lhs", "rhs")
            };
            let (left, right) = match (&p.right, swap) {
                (Term::Attr(a), true) => (a, Some(&p.left)),
                (Term::Attr(a), false) => (&p.left, Some(a)),
                (Term::Const(_), _) => (&p.left, None),
            };
            g.add_edge(n, var_node[&left.var.0], format!("{lhs}:{}", left.attr));
            if let Some(r) = right {
                g.add_edge(n, var_node[&r.var.0], format!("{rhs}:{}", r.attr));
            }
        }
    }
    for (i, o) in q.outputs.iter().enumerate() {
        let n = g.add_node(format!("O:{i}:{}", o.name));
        g.add_edge(
            n,
            var_node[&o.source.var.0],
            format!("src:{}", o.source.attr),
        );
    }
    QueryGraph { graph: g, var_node }
}

type Encoding = (Vec<usize>, Vec<(usize, usize, usize)>);

/// Canonical labeling: returns `perm` with `perm[node] = canonical index`.
/// Colour refinement splits nodes by label and neighbourhood; remaining ties
/// are broken by trying every member of the first non-singleton cell and
/// keeping the lexicographically smallest encoding.
pub fn canonical_labeling(g: &LabeledGraph) -> Vec<usize> {
    let n = g.len();
    if n == 0 {
        return Vec::new();
    }
    let intern = |items: Vec<&String>| -> BTreeMap<String, usize> {
        let mut v: Vec<String> = items.into_iter().cloned().collect();
        v.sort();
        v.dedup();
        v.into_iter().enumerate().map(|(i, s)| (s, i)).collect()
    };
    let node_ids = intern(g.labels.iter().collect());
    let edge_ids = intern(g.edges.iter().map(|e| &e.2).collect());
    let labels: Vec<usize> = g.labels.iter().map(|l| node_ids[l]).collect();
    // adjacency: (edge label, direction, neighbour)
    let mut adj: Vec<Vec<(usize, bool, usize)>> = vec![Vec::new(); n];
    let mut edges = Vec::with_capacity(g.edges.len());
    for (a, b, l) in &g.edges {
        let l = edge_ids[l];
        adj[*a].push((l, true, *b));
        adj[*b].push((l, false, *a));
        edges.push((*a, *b, l));
    }

    let ctx = Ctx {
        labels: &labels,
        adj: &adj,
        edges: &edges,
    };
    let start = ctx.refine(rank(&labels));
    let mut best: Option<(Encoding, Vec<usize>)> = None;
    ctx.search(start, &mut best);
    best.expect("at least one leaf").1
}

struct Ctx<'a> {
    labels: &'a [usize],
    adj: &'a [Vec<(usize, bool, usize)>],
    edges: &'a [(usize, usize, usize)],
}

fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("present"))
        .collect()
}

fn classes(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

impl Ctx<'_> {
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut count = classes(&colors);
        loop {
            let sigs: Vec<(usize, Vec<(usize, bool, usize)>)> = (0..colors.len())
                .map(|i| {
                    let mut nb: Vec<_> = self.adj[i]
                        .iter()
                        .map(|&(l, d, j)| (l, d, colors[j]))
                        .collect();
                    nb.sort_unstable();
                    (colors[i], nb)
                })
                .collect();
            let next = rank(&sigs);
            let c = classes(&next);
            colors = next;
            if c == count {
                return colors;
            }
            count = c;
        }
    }

    fn search(&self, colors: Vec<usize>, best: &mut Option<(Encoding, Vec<usize>)>) {
        let n = colors.len();
        let mut size = vec![0usize; n];
        for &c in &colors {
            size[c] += 1;
        }
        let target = (0..n).find(|&c| size[c] > 1);
        let Some(target) = target else {
            let enc = self.encode(&colors);
            if best.as_ref().is_none_or(|(b, _)| enc < *b) {
                *best = Some((enc, colors));
            }
            return;
        };
        for v in (0..n).filter(|&i| colors[i] == target) {
            let split: Vec<usize> = colors
                .iter()
                .enumerate()
                .map(|(i, &c)| 2 * c + usize::from(c == target && i != v))
                .collect();
            self.search(self.refine(rank(&split)), best);
        }
    }

    fn encode(&self, perm: &[usize]) -> Encoding {
        let mut labels = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[i];
        }
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(a, b, l)| (perm[a], perm[b], l))
            .collect();
        edges.sort_unstable();
        (labels, edges)
    }
}
