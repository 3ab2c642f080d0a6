//! Crossing minimization on a layered graph whose nodes are nested in
//! clusters (the group tree). A feasible ordering keeps every cluster's
//! nodes contiguous in each layer: a cluster lists its own members first,
//! then its child clusters in an order shared by all layers.

use std::cmp::Ordering as CmpOrdering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub node: usize,
    pub row: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerProblem {
    /// Layer of each node.
    pub layer: Vec<usize>,
    /// Cluster of each node; cluster 0 is the root.
    pub cluster: Vec<usize>,
    /// Parent of each cluster; `None` only for the root.
    pub parent: Vec<Option<usize>>,
    /// Tie-break key of each node (source offset).
    pub tie: Vec<usize>,
    pub edges: Vec<(Endpoint, Endpoint)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ordering {
    /// Child clusters of each cluster, top to bottom.
    pub child_order: Vec<Vec<usize>>,
    /// `members[cluster][layer]`: the cluster's own nodes in that layer.
    pub members: Vec<Vec<Vec<usize>>>,
}

impl LayerProblem {
    pub fn layer_count(&self) -> usize {
        self.layer.iter().max().map_or(0, |m| m + 1)
    }

    /// Source-order layering: members by tie key, clusters by index.
    pub fn initial_ordering(&self) -> Ordering {
        let nc = self.parent.len();
        let nl = self.layer_count();
        let mut child_order = vec![Vec::new(); nc];
        for (c, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                child_order[*p].push(c);
            }
        }
        let mut members = vec![vec![Vec::new(); nl]; nc];
        let mut nodes: Vec<usize> = (0..self.layer.len()).collect();
        nodes.sort_by_key(|&n| (self.tie[n], n));
        for n in nodes {
            members[self.cluster[n]][self.layer[n]].push(n);
        }
        Ordering {
            child_order,
            members,
        }
    }
}

impl Ordering {
    /// Top-to-bottom node sequence of every layer.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let nl = self.members.first().map_or(0, |m| m.len());
        (0..nl)
            .map(|l| {
                let mut out = Vec::new();
                self.flatten(0, l, &mut out);
                out
            })
            .collect()
    }

    fn flatten(&self, c: usize, l: usize, out: &mut Vec<usize>) {
        out.extend(&self.members[c][l]);
        for &k in &self.child_order[c] {
            self.flatten(k, l, out);
        }
    }
}

/// Pairs of edges between adjacent layers whose endpoints appear in opposite
/// vertical order. Endpoints are ordered by node position, then row.
/// Edges within one layer are not counted.
pub fn count_crossings(p: &LayerProblem, layers: &[Vec<usize>]) -> usize {
    let mut pos = vec![0usize; p.layer.len()];
    for seq in layers {
        for (i, &n) in seq.iter().enumerate() {
            pos[n] = i;
        }
    }
    let key = |e: Endpoint| (pos[e.node], e.row);
    let mut spans: Vec<(usize, (usize, usize), (usize, usize))> = Vec::new();
    for &(a, b) in &p.edges {
        let (la, lb) = (p.layer[a.node], p.layer[b.node]);
        if la + 1 == lb {
            spans.push((la, key(a), key(b)));
        } else if lb + 1 == la {
            spans.push((lb, key(b), key(a)));
        }
    }
    let mut count = 0;
    for i in 0..spans.len() {
        for j in i + 1..spans.len() {
            let (l1, a1, b1) = spans[i];
            let (l2, a2, b2) = spans[j];
            if l1 != l2 {
                continue;
            }
            let top = a1.cmp(&a2);
            let bottom = b1.cmp(&b2);
            if (top == CmpOrdering::Less && bottom == CmpOrdering::Greater)
                || (top == CmpOrdering::Greater && bottom == CmpOrdering::Less)
            {
                count += 1;
            }
        }
    }
    count
}

/// Result of [`order_within_layers`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderResult {
    pub ordering: Ordering,
    pub initial_crossings: usize,
    pub crossings: usize,
}

const MAX_SWEEPS: usize = 8;
/// Extra descents from shuffled starting orders, after the source-order one.
const RESTARTS: u64 = 8;

/// Barycenter sweeps (down then up, at most eight rounds, stopping once a
/// round brings no improvement) followed by greedy relocations until no
/// single move reduces the crossing count. The descent is repeated from a
/// fixed set of seeded shuffles of the source order and the best result is
/// kept (the earliest on ties), so output is deterministic. Never returns an
/// ordering with more crossings than the initial one.
pub fn order_within_layers(p: &LayerProblem) -> OrderResult {
    let initial = p.initial_ordering();
    let initial_crossings = count_crossings(p, &initial.layers());
    let (mut best, mut best_c) = descend(p, initial.clone(), initial_crossings);
    for seed in 0..RESTARTS {
        if best_c == 0 {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut start = initial.clone();
        for list in start
            .members
            .iter_mut()
            .flatten()
            .chain(start.child_order.iter_mut())
        {
            list.shuffle(&mut rng);
        }
        let c = count_crossings(p, &start.layers());
        let (o, c) = descend(p, start, c);
        if c < best_c {
            best = o;
            best_c = c;
        }
    }
    OrderResult {
        ordering: best,
        initial_crossings,
        crossings: best_c,
    }
}

fn descend(p: &LayerProblem, start: Ordering, start_c: usize) -> (Ordering, usize) {
    let mut best = start.clone();
    let mut best_c = start_c;
    let mut cur = start;
    let nl = p.layer_count();
    for _ in 0..MAX_SWEEPS {
        if best_c == 0 {
            break;
        }
        for l in 1..nl {
            sort_layer(p, &mut cur, l, l - 1);
        }
        for l in (0..nl.saturating_sub(1)).rev() {
            sort_layer(p, &mut cur, l, l + 1);
        }
        let c = count_crossings(p, &cur.layers());
        if c < best_c {
            best = cur.clone();
            best_c = c;
        } else {
            break;
        }
    }
    let c = exchange(p, &mut best, best_c);
    (best, c)
}

fn sort_layer(p: &LayerProblem, o: &mut Ordering, l: usize, reference: usize) {
    let layers = o.layers();
    let mut pos = vec![f64::NAN; p.layer.len()];
    for (i, &n) in layers[reference].iter().enumerate() {
        pos[n] = i as f64;
    }
    let mut current = vec![0f64; p.layer.len()];
    for (i, &n) in layers[l].iter().enumerate() {
        current[n] = i as f64;
    }
    // Barycenter of each node in `l` over its neighbours in `reference`;
    // rows break ties between ports of one neighbour.
    let mut sum = vec![0f64; p.layer.len()];
    let mut cnt = vec![0usize; p.layer.len()];
    for &(a, b) in &p.edges {
        for (x, y) in [(a, b), (b, a)] {
            if p.layer[x.node] == l && p.layer[y.node] == reference {
                sum[x.node] += pos[y.node] + y.row as f64 / 1024.0;
                cnt[x.node] += 1;
            }
        }
    }
    let bary = |n: usize| {
        if cnt[n] > 0 {
            sum[n] / cnt[n] as f64
        } else {
            current[n]
        }
    };
    for c in 0..o.members.len() {
        o.members[c][l].sort_by(|&x, &y| {
            bary(x)
                .total_cmp(&bary(y))
                .then(p.tie[x].cmp(&p.tie[y]))
                .then(x.cmp(&y))
        });
    }
    // Child clusters follow the mean barycenter of their nodes in `l`.
    for c in 0..o.child_order.len() {
        let keys: Vec<(usize, Option<f64>)> = o.child_order[c]
            .iter()
            .map(|&k| {
                let mut nodes = Vec::new();
                o.flatten(k, l, &mut nodes);
                let linked: Vec<f64> = nodes
                    .iter()
                    .filter(|&&n| cnt[n] > 0)
                    .map(|&n| bary(n))
                    .collect();
                let key =
                    (!linked.is_empty()).then(|| linked.iter().sum::<f64>() / linked.len() as f64);
                (k, key)
            })
            .collect();
        if keys.iter().all(|(_, k)| k.is_some()) {
            let mut keys = keys;
            keys.sort_by(|a, b| a.1.unwrap().total_cmp(&b.1.unwrap()).then(a.0.cmp(&b.0)));
            o.child_order[c] = keys.into_iter().map(|(k, _)| k).collect();
        }
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Members(usize, usize),
    Children(usize),
}

fn slot_mut(o: &mut Ordering, s: Slot) -> &mut Vec<usize> {
    match s {
        Slot::Members(c, l) => &mut o.members[c][l],
        Slot::Children(c) => &mut o.child_order[c],
    }
}

/// Greedy relocations: move one member, or one sibling cluster, to any other
/// position in its list while that lowers the crossing count.
fn exchange(p: &LayerProblem, o: &mut Ordering, mut best: usize) -> usize {
    let mut slots = Vec::new();
    for c in 0..o.members.len() {
        for l in 0..o.members[c].len() {
            slots.push(Slot::Members(c, l));
        }
        slots.push(Slot::Children(c));
    }
    loop {
        let mut improved = false;
        for &s in &slots {
            let len = slot_mut(o, s).len();
            for i in 0..len {
                for j in 0..len {
                    if best == 0 {
                        return 0;
                    }
                    if i == j {
                        continue;
                    }
                    let v = slot_mut(o, s);
                    let x = v.remove(i);
                    v.insert(j, x);
                    let n = count_crossings(p, &o.layers());
                    if n < best {
                        best = n;
                        improved = true;
                    } else {
                        let v = slot_mut(o, s);
                        let x = v.remove(j);
                        v.insert(i, x);
                    }
                }
            }
        }
        if !improved {
            return best;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(node: usize, row: usize) -> Endpoint {
        Endpoint { node, row }
    }

    fn flat(layer: Vec<usize>, edges: Vec<(Endpoint, Endpoint)>) -> LayerProblem {
        let n = layer.len();
        LayerProblem {
            layer,
            cluster: vec![0; n],
            parent: vec![None],
            tie: (0..n).collect(),
            edges,
        }
    }

    #[test]
    fn single_swap_removes_crossing() {
        // a1=0, a2=1 in layer 0; b1=2, b2=3 in layer 1.
        let p = flat(
            vec![0, 0, 1, 1],
            vec![(ep(0, 0), ep(3, 0)), (ep(1, 0), ep(2, 0))],
        );
        let r = order_within_layers(&p);
        assert_eq!(r.initial_crossings, 1);
        assert_eq!(r.crossings, 0);
        assert_eq!(count_crossings(&p, &r.ordering.layers()), 0);
    }

    #[test]
    fn complete_bipartite_keeps_one_crossing() {
        let p = flat(
            vec![0, 0, 1, 1],
            vec![
                (ep(0, 0), ep(2, 0)),
                (ep(0, 0), ep(3, 0)),
                (ep(1, 0), ep(2, 0)),
                (ep(1, 0), ep(3, 0)),
            ],
        );
        let r = order_within_layers(&p);
        assert_eq!(r.crossings, 1);
    }

    #[test]
    fn rows_order_ports_within_a_node() {
        // One node with two rows linked to two nodes in the next layer.
        let p = flat(
            vec![0, 1, 1],
            vec![(ep(0, 0), ep(2, 0)), (ep(0, 1), ep(1, 0))],
        );
        assert_eq!(count_crossings(&p, &[vec![0], vec![1, 2]]), 1);
        assert_eq!(order_within_layers(&p).crossings, 0);
    }

    #[test]
    fn clusters_stay_contiguous() {
        // Cluster 1 holds nodes 2 and 3; node 1 is in the root.
        let p = LayerProblem {
            layer: vec![0, 1, 1, 1],
            cluster: vec![0, 0, 1, 1],
            parent: vec![None, Some(0)],
            tie: vec![0, 1, 2, 3],
            edges: vec![(ep(0, 0), ep(2, 0)), (ep(0, 1), ep(1, 0))],
        };
        let r = order_within_layers(&p);
        let layer1 = &r.ordering.layers()[1];
        let a = layer1.iter().position(|&n| n == 2).unwrap();
        let b = layer1.iter().position(|&n| n == 3).unwrap();
        assert_eq!(a.abs_diff(b), 1);
        assert_eq!(layer1[0], 1);
    }
}
