#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use qviz::calculus::CalculusQuery;
use qviz::layout::{LayerProblem, Ordering};
use qviz::pattern::LabeledGraph;
use qviz::pipeline::compile;
use qviz::sql::Schema;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn example_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(rel)
}

pub fn read_example(rel: &str) -> String {
    std::fs::read_to_string(example_path(rel)).unwrap()
}

pub fn rs_schema() -> Schema {
    Schema::from_json(&read_example("queries/rs_schema.json")).unwrap()
}

pub fn calc(sql: &str) -> CalculusQuery {
    compile(sql, None).unwrap().calculus
}

// ---------------------------------------------------------------------------
// Random query generator
// ---------------------------------------------------------------------------

pub const RELATIONS: [&str; 3] = ["r", "s", "t"];
pub const ATTRS: [&str; 3] = ["a", "b", "c"];
const OPS: [&str; 6] = ["=", "=", "=", "<>", "<", ">="];

#[derive(Clone, Debug)]
pub enum Right {
    Attr(usize, usize),
    Const(i64),
}

#[derive(Clone, Debug)]
pub struct Pred {
    pub left: (usize, usize),
    pub op: &'static str,
    pub right: Right,
}

#[derive(Clone, Debug)]
pub struct Block {
    /// Global variable indices with their relation index.
    pub vars: Vec<(usize, usize)>,
    pub preds: Vec<Pred>,
    /// (negated, child)
    pub children: Vec<(bool, Block)>,
}

/// A query in the supported subset, before it is written out as SQL.
#[derive(Clone, Debug)]
pub struct GenQuery {
    pub outputs: Vec<(usize, usize)>,
    pub root: Block,
    pub var_count: usize,
}

pub struct GenConfig {
    pub max_vars: usize,
    pub max_depth: usize,
    pub constants: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_vars: 6,
            max_depth: 3,
            constants: true,
        }
    }
}

/// Connected query: every variable is linked by a predicate to an earlier
/// variable in scope, and every child block is correlated with its parent.
pub fn gen_query(seed: u64, cfg: &GenConfig) -> GenQuery {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next = 0usize;
    let budget = rng.random_range(1..=cfg.max_vars);
    let root = gen_block(&mut rng, cfg, &mut next, budget, 0, &[]);
    let root_vars: Vec<usize> = root.vars.iter().map(|v| v.0).collect();
    let n_out = rng.random_range(1..=2);
    let outputs = (0..n_out)
        .map(|_| {
            (
                root_vars[rng.random_range(0..root_vars.len())],
                rng.random_range(0..ATTRS.len()),
            )
        })
        .collect();
    GenQuery {
        outputs,
        root,
        var_count: next,
    }
}

fn gen_block(
    rng: &mut ChaCha8Rng,
    cfg: &GenConfig,
    next: &mut usize,
    budget: usize,
    depth: usize,
    outer: &[usize],
) -> Block {
    let own = if depth == 0 {
        rng.random_range(1..=budget.min(3))
    } else {
        rng.random_range(1..=budget.min(2))
    };
    let mut vars = Vec::new();
    let mut preds = Vec::new();
    let mut scope: Vec<usize> = outer.to_vec();
    for i in 0..own {
        let v = *next;
        *next += 1;
        vars.push((v, rng.random_range(0..RELATIONS.len())));
        // Link to something in scope (the first root variable has nothing).
        if !scope.is_empty() && (i > 0 || depth > 0) {
            let other = scope[rng.random_range(0..scope.len())];
            let (l, r) = if rng.random_bool(0.5) {
                (v, other)
            } else {
                (other, v)
            };
            preds.push(Pred {
                left: (l, rng.random_range(0..ATTRS.len())),
                op: OPS[rng.random_range(0..OPS.len())],
                right: Right::Attr(r, rng.random_range(0..ATTRS.len())),
            });
        }
        scope.push(v);
    }
    if cfg.constants && rng.random_bool(0.3) {
        let v = vars[rng.random_range(0..vars.len())].0;
        preds.push(Pred {
            left: (v, rng.random_range(0..ATTRS.len())),
            op: OPS[rng.random_range(0..OPS.len())],
            right: Right::Const(rng.random_range(0..3)),
        });
    }
    if rng.random_bool(0.2) && scope.len() > 1 {
        let a = scope[rng.random_range(0..scope.len())];
        let b = scope[rng.random_range(0..scope.len())];
        preds.push(Pred {
            left: (a, rng.random_range(0..ATTRS.len())),
            op: OPS[rng.random_range(0..OPS.len())],
            right: Right::Attr(b, rng.random_range(0..ATTRS.len())),
        });
    }
    let mut children = Vec::new();
    let mut left = budget - own;
    while depth < cfg.max_depth && left > 0 && rng.random_bool(0.6) {
        let b = rng.random_range(1..=left);
        let child = gen_block(rng, cfg, next, b, depth + 1, &scope);
        left -= child.total_vars();
        children.push((rng.random_bool(0.7), child));
        if rng.random_bool(0.5) {
            break;
        }
    }
    Block {
        vars,
        preds,
        children,
    }
}

impl Block {
    pub fn total_vars(&self) -> usize {
        self.vars.len()
            + self
                .children
                .iter()
                .map(|(_, c)| c.total_vars())
                .sum::<usize>()
    }
}

/// Surface choices that must not change the pattern.
#[derive(Clone, Debug)]
pub struct Rendering {
    pub aliases: Vec<String>,
    pub shuffle_seed: Option<u64>,
    /// Write eligible subqueries as `[NOT] IN`.
    pub use_in: bool,
}

impl Rendering {
    pub fn plain(q: &GenQuery) -> Rendering {
        Rendering {
            aliases: (0..q.var_count).map(|i| format!("v{i}")).collect(),
            shuffle_seed: None,
            use_in: false,
        }
    }

    pub fn random(q: &GenQuery, seed: u64) -> Rendering {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut aliases: Vec<String> = (0..q.var_count).map(|i| format!("x{i}")).collect();
        aliases.shuffle(&mut rng);
        Rendering {
            aliases,
            shuffle_seed: Some(rng.random()),
            use_in: rng.random_bool(0.5),
        }
    }
}

pub fn to_sql(q: &GenQuery, r: &Rendering) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(r.shuffle_seed.unwrap_or(0));
    let cols: Vec<String> = q
        .outputs
        .iter()
        .map(|(v, a)| format!("{}.{}", r.aliases[*v], ATTRS[*a]))
        .collect();
    format!(
        "select distinct {} {}",
        cols.join(", "),
        block_sql(&q.root, r, &mut rng)
    )
}

fn pred_sql(p: &Pred, r: &Rendering) -> String {
    let right = match &p.right {
        Right::Attr(v, a) => format!("{}.{}", r.aliases[*v], ATTRS[*a]),
        Right::Const(c) => c.to_string(),
    };
    format!(
        "{}.{} {} {}",
        r.aliases[p.left.0], ATTRS[p.left.1], p.op, right
    )
}

/// `from ... [where ...]`
fn block_sql(b: &Block, r: &Rendering, rng: &mut ChaCha8Rng) -> String {
    let mut from: Vec<String> = b
        .vars
        .iter()
        .map(|(v, rel)| format!("{} {}", RELATIONS[*rel], r.aliases[*v]))
        .collect();
    let mut conj: Vec<String> = b.preds.iter().map(|p| pred_sql(p, r)).collect();
    for (neg, c) in &b.children {
        conj.push(child_sql(*neg, c, r, rng));
    }
    if r.shuffle_seed.is_some() {
        from.shuffle(rng);
        conj.shuffle(rng);
    }
    let mut s = format!("from {}", from.join(", "));
    if !conj.is_empty() {
        s.push_str(" where ");
        s.push_str(&conj.join(" and "));
    }
    s
}

fn child_sql(neg: bool, c: &Block, r: &Rendering, rng: &mut ChaCha8Rng) -> String {
    let not = if neg { "not " } else { "" };
    if r.use_in {
        // An equality between an outer attribute and one of the child's own
        // variables can become the IN test.
        let own: BTreeSet<usize> = c.vars.iter().map(|v| v.0).collect();
        let pick = c.preds.iter().position(|p| {
            p.op == "="
                && matches!(p.right, Right::Attr(rv, _) if own.contains(&rv) != own.contains(&p.left.0))
        });
        if let Some(i) = pick {
            let p = &c.preds[i];
            let Right::Attr(rv, ra) = p.right else {
                unreachable!()
            };
            let ((ov, oa), (iv, ia)) = if own.contains(&rv) {
                (p.left, (rv, ra))
            } else {
                ((rv, ra), p.left)
            };
            let mut rest = c.clone();
            rest.preds.remove(i);
            return format!(
                "{}.{} {not}in (select {}.{} {})",
                r.aliases[ov],
                ATTRS[oa],
                r.aliases[iv],
                ATTRS[ia],
                block_sql(&rest, r, rng)
            );
        }
    }
    format!("{not}exists (select * {})", block_sql(c, r, rng))
}

// ---------------------------------------------------------------------------
// Brute-force oracles
// ---------------------------------------------------------------------------

/// Label-preserving isomorphism by backtracking over same-label candidates.
pub fn isomorphic(g: &LabeledGraph, h: &LabeledGraph) -> bool {
    if g.labels.len() != h.labels.len() || g.edges.len() != h.edges.len() {
        return false;
    }
    let mut gl = g.labels.clone();
    let mut hl = h.labels.clone();
    gl.sort();
    hl.sort();
    if gl != hl {
        return false;
    }
    let multiset = |x: &LabeledGraph| {
        let mut m: BTreeMap<(usize, usize, String), usize> = BTreeMap::new();
        for e in &x.edges {
            *m.entry(e.clone()).or_default() += 1;
        }
        m
    };
    let ge = multiset(g);
    let he = multiset(h);
    let n = g.labels.len();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        g: &LabeledGraph,
        h: &LabeledGraph,
        ge: &BTreeMap<(usize, usize, String), usize>,
        he: &BTreeMap<(usize, usize, String), usize>,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = g.labels.len();
        if i == n {
            return true;
        }
        for cand in 0..n {
            if used[cand] || h.labels[cand] != g.labels[i] {
                continue;
            }
            map[i] = cand;
            // Every edge among already mapped nodes must match in multiplicity.
            let ok = ge.iter().all(|((a, b, l), cnt)| {
                if *a > i || *b > i {
                    return true;
                }
                he.get(&(map[*a], map[*b], l.clone())) == Some(cnt)
            });
            if ok {
                used[cand] = true;
                if go(i + 1, g, h, ge, he, map, used) {
                    return true;
                }
                used[cand] = false;
            }
        }
        map[i] = usize::MAX;
        false
    }
    go(0, g, h, &ge, &he, &mut map, &mut used)
}

/// Crossings of an explicit layer sequence, counted independently of the
/// library: endpoints compared by (position in layer, row).
pub fn crossings_oracle(p: &LayerProblem, layers: &[Vec<usize>]) -> usize {
    let mut at = BTreeMap::new();
    for seq in layers {
        for (i, n) in seq.iter().enumerate() {
            at.insert(*n, i);
        }
    }
    let mut segs = Vec::new();
    for (x, y) in &p.edges {
        let (lx, ly) = (p.layer[x.node], p.layer[y.node]);
        if lx.abs_diff(ly) != 1 {
            continue;
        }
        let (lo, hi) = if lx < ly { (x, y) } else { (y, x) };
        segs.push((lx.min(ly), (at[&lo.node], lo.row), (at[&hi.node], hi.row)));
    }
    let mut c = 0;
    for i in 0..segs.len() {
        for j in 0..i {
            let (a, b) = (segs[i], segs[j]);
            if a.0 == b.0 && ((a.1 < b.1 && a.2 > b.2) || (a.1 > b.1 && a.2 < b.2)) {
                c += 1;
            }
        }
    }
    c
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Minimum crossings over every ordering that keeps clusters contiguous,
/// or `None` when there are more than `limit` such orderings.
pub fn optimal_crossings(p: &LayerProblem, limit: usize) -> Option<usize> {
    let base = p.initial_ordering();
    // Independent choices: each (cluster, layer) member list and each
    // cluster's child order.
    let mut slots: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut total: usize = 1;
    for c in 0..base.members.len() {
        for l in 0..base.members[c].len() {
            let perms = permutations(&base.members[c][l]);
            total = total.saturating_mul(perms.len());
            slots.push(perms);
        }
        let perms = permutations(&base.child_order[c]);
        total = total.saturating_mul(perms.len());
        slots.push(perms);
    }
    if total > limit {
        return None;
    }
    let mut best = usize::MAX;
    let mut choice = vec![0usize; slots.len()];
    loop {
        let mut o = Ordering {
            child_order: base.child_order.clone(),
            members: base.members.clone(),
        };
        let mut k = 0;
        for c in 0..base.members.len() {
            for l in 0..base.members[c].len() {
                o.members[c][l] = slots[k][choice[k]].clone();
                k += 1;
            }
            o.child_order[c] = slots[k][choice[k]].clone();
            k += 1;
        }
        best = best.min(crossings_oracle(p, &o.layers()));
        // Odometer increment.
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Some(best);
            }
            choice[i] += 1;
            if choice[i] < slots[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// DOT grammar check
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Id(String),
    Sym(char),
    Arrow,
}

fn dot_tokens(src: &str) -> Result<Vec<Tok>, String> {
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match cs.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') if cs.get(i + 1) == Some(&'"') => {
                        s.push('"');
                        i += 2;
                    }
                    Some(ch) => {
                        s.push(*ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
        } else if c == '-' && cs.get(i + 1) == Some(&'>') {
            out.push(Tok::Arrow);
            i += 2;
        } else if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '.') {
                i += 1;
            }
            if i == start {
                return Err(format!("unexpected `{c}`"));
            }
            out.push(Tok::Id(cs[start..i].iter().collect()));
        } else if "{}[]=;,:".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(format!("unexpected `{c}`"));
        }
    }
    Ok(out)
}

struct DotParser {
    toks: Vec<Tok>,
    pos: usize,
    pub nodes: usize,
    pub clusters: usize,
    pub edges: usize,
}

impl DotParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }
    fn expect_sym(&mut self, c: char) -> Result<(), String> {
        match self.bump() {
            Some(Tok::Sym(x)) if x == c => Ok(()),
            t => Err(format!("expected `{c}`, found {t:?}")),
        }
    }
    fn id(&mut self) -> Result<String, String> {
        match self.bump() {
            Some(Tok::Id(s)) => Ok(s),
            t => Err(format!("expected id, found {t:?}")),
        }
    }
    fn graph(&mut self) -> Result<(), String> {
        let kw = self.id()?;
        if kw != "digraph" && kw != "graph" {
            return Err("expected graph keyword".into());
        }
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.id()?;
        }
        self.block()?;
        if self.pos != self.toks.len() {
            return Err("trailing tokens".into());
        }
        Ok(())
    }
    fn block(&mut self) -> Result<(), String> {
        self.expect_sym('{')?;
        loop {
            match self.peek() {
                Some(Tok::Sym('}')) => {
                    self.bump();
                    return Ok(());
                }
                None => return Err("unterminated block".into()),
                _ => self.stmt()?,
            }
            if let Some(Tok::Sym(';')) = self.peek() {
                self.bump();
            }
        }
    }
    fn attr_list(&mut self) -> Result<(), String> {
        self.expect_sym('[')?;
        loop {
            if let Some(Tok::Sym(']')) = self.peek() {
                self.bump();
                return Ok(());
            }
            self.id()?;
            self.expect_sym('=')?;
            self.id()?;
            if let Some(Tok::Sym(',' | ';')) = self.peek() {
                self.bump();
            }
        }
    }
    fn node_id(&mut self) -> Result<(), String> {
        self.id()?;
        if let Some(Tok::Sym(':')) = self.peek() {
            self.bump();
            self.id()?;
        }
        Ok(())
    }
    fn stmt(&mut self) -> Result<(), String> {
        match self.peek().cloned() {
            Some(Tok::Id(k)) if k == "subgraph" => {
                self.bump();
                let name = self.id()?;
                if name.starts_with("cluster") {
                    self.clusters += 1;
                }
                self.block()
            }
            Some(Tok::Id(k)) if (k == "graph" || k == "node" || k == "edge") => {
                self.bump();
                self.attr_list()
            }
            Some(Tok::Id(_)) => {
                self.node_id()?;
                if let Some(Tok::Sym('=')) = self.peek() {
                    self.bump();
                    return self.id().map(|_| ());
                }
                let mut is_edge = false;
                while let Some(Tok::Arrow) = self.peek() {
                    self.bump();
                    self.node_id()?;
                    is_edge = true;
                }
                if is_edge {
                    self.edges += 1;
                } else {
                    self.nodes += 1;
                }
                if let Some(Tok::Sym('[')) = self.peek() {
                    self.attr_list()?;
                }
                Ok(())
            }
            t => Err(format!("unexpected {t:?}")),
        }
    }
}

/// Checks `src` against the DOT statement grammar (the subset with node,
/// edge, attribute and subgraph statements) and returns
/// (node statements, cluster subgraphs, edge statements).
pub fn check_dot(src: &str) -> Result<(usize, usize, usize), String> {
    let mut p = DotParser {
        toks: dot_tokens(src)?,
        pos: 0,
        nodes: 0,
        clusters: 0,
        edges: 0,
    };
    p.graph()?;
    Ok((p.nodes, p.clusters, p.edges))
}

/// Checks record labels: balanced braces and only escaped `<`, `>`, `|`
/// outside port markers.
pub fn check_record_label(label: &str) -> Result<Vec<String>, String> {
    let mut ports = Vec::new();
    let cs: Vec<char> = label.chars().collect();
    let mut i = 0;
    let mut depth = 0i32;
    while i < cs.len() {
        match cs[i] {
            '\\' => i += 1,
            '{' => depth += 1,
            '}' => depth -= 1,
            '<' => {
                let end = cs[i..]
                    .iter()
                    .position(|&c| c == '>')
                    .ok_or("unclosed port")?;
                ports.push(cs[i + 1..i + end].iter().collect());
                i += end;
            }
            '>' => return Err("stray `>`".into()),
            _ => {}
        }
        if depth < 0 {
            return Err("unbalanced braces".into());
        }
        i += 1;
    }
    if depth != 0 {
        return Err("unbalanced braces".into());
    }
    Ok(ports)
}

// ---------------------------------------------------------------------------
// Layout checks
// ---------------------------------------------------------------------------

use qviz::diagram::{Diagram, EdgeTarget};
use qviz::layout::{assign_layers, layer_problem, order_within_layers, PositionedDiagram, Rect};

/// Largest number of feasible orderings the optimum oracle will enumerate.
pub const OPTIMUM_LIMIT: usize = 500_000;

#[derive(Debug, Default)]
pub struct LayoutCheck {
    /// Edges spanning more than one layer.
    pub long_edges: Vec<String>,
    pub initial_crossings: usize,
    pub crossings: usize,
    /// Brute-force minimum, when every layer has at most 6 nodes and the
    /// search space is small enough.
    pub optimum: Option<usize>,
    pub max_layer_size: usize,
    /// Geometric violations: overlaps, containment, layer-0 occupancy.
    pub geometry: Vec<String>,
}

pub fn check_layout(d: &Diagram, pd: &PositionedDiagram) -> LayoutCheck {
    let mut c = LayoutCheck::default();
    let layers = assign_layers(d).unwrap();
    for e in &d.edges {
        if let EdgeTarget::Port(p) = &e.to {
            let a = layers[d.node_index(&e.from.node).unwrap()];
            let b = layers[d.node_index(&p.node).unwrap()];
            if a.abs_diff(b) > 1 {
                c.long_edges.push(e.id.clone());
            }
        }
    }
    let problem = layer_problem(d, &layers);
    let result = order_within_layers(&problem);
    c.initial_crossings = crossings_oracle(&problem, &problem.initial_ordering().layers());
    c.crossings = crossings_oracle(&problem, &result.ordering.layers());
    if c.crossings != pd.crossings {
        c.geometry.push(format!(
            "reported {} crossings, counted {}",
            pd.crossings, c.crossings
        ));
    }
    let mut sizes = vec![0usize; problem.layer_count()];
    for &l in &layers {
        sizes[l] += 1;
    }
    c.max_layer_size = sizes.iter().copied().max().unwrap_or(0);
    if c.max_layer_size <= 6 {
        c.optimum = optimal_crossings(&problem, OPTIMUM_LIMIT);
    }
    c.geometry.extend(geometry_violations(pd));
    c
}

pub fn geometry_violations(pd: &PositionedDiagram) -> Vec<String> {
    let mut v = Vec::new();
    let d = &pd.diagram;
    let zero: Vec<&str> = pd
        .nodes
        .iter()
        .filter(|n| n.layer == 0)
        .map(|n| n.id.as_str())
        .collect();
    if zero != ["select"] {
        v.push(format!("layer 0 holds {zero:?}"));
    }
    for (i, a) in pd.nodes.iter().enumerate() {
        for b in &pd.nodes[..i] {
            if overlaps(&a.rect, &b.rect) {
                v.push(format!("{} overlaps {}", a.id, b.id));
            }
        }
    }
    for g in &d.groups {
        let gr = pd.group(&g.id).unwrap().rect;
        for m in &g.members {
            let r = pd.node(m).unwrap().rect;
            if !strictly_inside(&r, &gr, 1) {
                v.push(format!("{m} not inside {}", g.id));
            }
        }
        for child in d
            .groups
            .iter()
            .filter(|c| c.parent.as_deref() == Some(&g.id))
        {
            let r = pd.group(&child.id).unwrap().rect;
            if !strictly_inside(&r, &gr, 1) {
                v.push(format!("{} not inside {}", child.id, g.id));
            }
        }
        // Boxes outside the group's subtree must not sit inside it.
        let chain_has = |node: &str| {
            d.group_chain(d.node(node).unwrap().group.as_deref())
                .iter()
                .any(|x| x.id == g.id)
        };
        for n in &pd.nodes {
            if !chain_has(&n.id) && overlaps(&n.rect, &gr) {
                v.push(format!("{} intrudes on {}", n.id, g.id));
            }
        }
    }
    v
}

fn overlaps(a: &Rect, b: &Rect) -> bool {
    a.x < b.x + b.width && b.x < a.x + a.width && a.y < b.y + b.height && b.y < a.y + a.height
}

fn strictly_inside(inner: &Rect, outer: &Rect, pad: i64) -> bool {
    inner.x - outer.x >= pad
        && inner.y - outer.y >= pad
        && (outer.x + outer.width) - (inner.x + inner.width) >= pad
        && (outer.y + outer.height) - (inner.y + inner.height) >= pad
}

/// The fuzz corpus used by the layout properties: generated queries in both
/// dialects (QueryVis falling back when it cannot draw the query).
pub fn fuzz_diagrams(count: u64) -> Vec<(u64, PositionedDiagram)> {
    use qviz::diagram::Dialect;
    use qviz::pipeline::{visualize, Options};
    let mut out = Vec::new();
    for seed in 0..count {
        let q = gen_query(seed, &GenConfig::default());
        let sql = to_sql(&q, &Rendering::plain(&q));
        let dialect = if seed % 2 == 0 {
            Dialect::QueryVis
        } else {
            Dialect::RelationalDiagrams
        };
        let opts = Options {
            dialect,
            ..Options::default()
        };
        out.push((seed, visualize(&sql, None, opts).unwrap().positioned));
    }
    out
}

// ---------------------------------------------------------------------------
// JSON Schema subset
// ---------------------------------------------------------------------------

use serde_json::Value as Json;

/// Validates `doc` against `schema`, supporting the keywords the repository's
/// schema file uses: type, const, enum, required, properties,
/// additionalProperties, items, $ref (local), oneOf, pattern, minimum,
/// maximum. Returns the paths of violations.
pub fn validate_schema(root: &Json, doc: &Json) -> Vec<String> {
    let mut errs = Vec::new();
    validate_at(root, root, doc, "$", &mut errs);
    errs
}

fn resolve_ref<'a>(root: &'a Json, r: &str) -> &'a Json {
    let path = r.strip_prefix("#/").expect("local ref");
    path.split('/').fold(root, |v, k| &v[k])
}

fn type_matches(t: &str, v: &Json) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "integer" => v.is_i64() || v.is_u64(),
        "number" => v.is_number(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        _ => panic!("unknown type {t}"),
    }
}

fn validate_at(root: &Json, s: &Json, v: &Json, path: &str, errs: &mut Vec<String>) {
    if let Some(r) = s.get("$ref").and_then(Json::as_str) {
        return validate_at(root, resolve_ref(root, r), v, path, errs);
    }
    if let Some(t) = s.get("type") {
        let ok = match t {
            Json::String(t) => type_matches(t, v),
            Json::Array(ts) => ts.iter().any(|t| type_matches(t.as_str().unwrap(), v)),
            _ => panic!("bad type"),
        };
        if !ok {
            errs.push(format!("{path}: expected type {t}"));
            return;
        }
    }
    if let Some(c) = s.get("const") {
        if c != v {
            errs.push(format!("{path}: expected {c}"));
        }
    }
    if let Some(Json::Array(e)) = s.get("enum") {
        if !e.contains(v) {
            errs.push(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(n) = v.as_f64() {
        if let Some(m) = s.get("minimum").and_then(Json::as_f64) {
            if n < m {
                errs.push(format!("{path}: below minimum"));
            }
        }
        if let Some(m) = s.get("maximum").and_then(Json::as_f64) {
            if n > m {
                errs.push(format!("{path}: above maximum"));
            }
        }
    }
    if let (Some(p), Some(text)) = (s.get("pattern").and_then(Json::as_str), v.as_str()) {
        if !regex_lite_match(p, text) {
            errs.push(format!("{path}: {text:?} does not match {p}"));
        }
    }
    if let Some(Json::Array(alts)) = s.get("oneOf") {
        let n = alts
            .iter()
            .filter(|a| {
                let mut e = Vec::new();
                validate_at(root, a, v, path, &mut e);
                e.is_empty()
            })
            .count();
        if n != 1 {
            errs.push(format!("{path}: matches {n} oneOf branches"));
        }
    }
    if let Json::Object(obj) = v {
        if let Some(Json::Array(req)) = s.get("required") {
            for r in req {
                if !obj.contains_key(r.as_str().unwrap()) {
                    errs.push(format!("{path}: missing {r}"));
                }
            }
        }
        let props = s.get("properties").and_then(Json::as_object);
        for (k, val) in obj {
            let sub = format!("{path}.{k}");
            match props.and_then(|p| p.get(k)) {
                Some(ps) => validate_at(root, ps, val, &sub, errs),
                None => match s.get("additionalProperties") {
                    Some(Json::Bool(false)) => errs.push(format!("{sub}: not allowed")),
                    Some(ap @ Json::Object(_)) => validate_at(root, ap, val, &sub, errs),
                    _ => {}
                },
            }
        }
    }
    if let (Json::Array(items), Some(is)) = (v, s.get("items")) {
        for (i, item) in items.iter().enumerate() {
            validate_at(root, is, item, &format!("{path}[{i}]"), errs);
        }
    }
}

/// Anchored matching for the pattern subset: literals, `[a-z]` style
/// classes, groups with `|`, and the `+`, `*`, `?` quantifiers.
pub fn regex_lite_match(pattern: &str, text: &str) -> bool {
    let p = pattern
        .strip_prefix('^')
        .and_then(|p| p.strip_suffix('$'))
        .expect("anchored pattern");
    let chars: Vec<char> = p.chars().collect();
    let (node, rest) = parse_alt(&chars);
    assert!(rest.is_empty(), "unsupported pattern {pattern}");
    let t: Vec<char> = text.chars().collect();
    matches(&node, &t).contains(&t.len())
}

#[derive(Debug)]
enum Re {
    Char(char),
    Class(Vec<(char, char)>),
    Seq(Vec<Re>),
    Alt(Vec<Re>),
    Repeat(Box<Re>, usize, bool),
}

fn parse_alt(s: &[char]) -> (Re, &[char]) {
    let mut alts = Vec::new();
    let mut s = s;
    loop {
        let (seq, rest) = parse_seq(s);
        alts.push(seq);
        s = rest;
        match s.first() {
            Some('|') => s = &s[1..],
            _ => return (Re::Alt(alts), s),
        }
    }
}

fn parse_seq(s: &[char]) -> (Re, &[char]) {
    let mut items = Vec::new();
    let mut s = s;
    while let Some(&c) = s.first() {
        let (atom, rest) = match c {
            '|' | ')' => break,
            '(' => {
                let (inner, rest) = parse_alt(&s[1..]);
                assert_eq!(rest.first(), Some(&')'));
                (inner, &rest[1..])
            }
            '[' => {
                let end = s.iter().position(|&x| x == ']').unwrap();
                let body = &s[1..end];
                let mut ranges = Vec::new();
                let mut i = 0;
                while i < body.len() {
                    if i + 2 < body.len() && body[i + 1] == '-' {
                        ranges.push((body[i], body[i + 2]));
                        i += 3;
                    } else {
                        ranges.push((body[i], body[i]));
                        i += 1;
                    }
                }
                (Re::Class(ranges), &s[end + 1..])
            }
            c => (Re::Char(c), &s[1..]),
        };
        s = rest;
        let atom = match s.first() {
            Some('+') => {
                s = &s[1..];
                Re::Repeat(Box::new(atom), 1, true)
            }
            Some('*') => {
                s = &s[1..];
                Re::Repeat(Box::new(atom), 0, true)
            }
            Some('?') => {
                s = &s[1..];
                Re::Repeat(Box::new(atom), 0, false)
            }
            _ => atom,
        };
        items.push(atom);
    }
    (Re::Seq(items), s)
}

/// End positions reachable after matching `re` at the start of `t`.
fn matches(re: &Re, t: &[char]) -> BTreeSet<usize> {
    match_from(re, t, 0)
}

fn match_from(re: &Re, t: &[char], at: usize) -> BTreeSet<usize> {
    match re {
        Re::Char(c) => (t.get(at) == Some(c))
            .then_some(at + 1)
            .into_iter()
            .collect(),
        Re::Class(rs) => t
            .get(at)
            .filter(|ch| rs.iter().any(|(a, b)| (a..=b).contains(ch)))
            .map(|_| at + 1)
            .into_iter()
            .collect(),
        Re::Seq(items) => items.iter().fold(BTreeSet::from([at]), |cur, item| {
            cur.into_iter()
                .flat_map(|p| match_from(item, t, p))
                .collect()
        }),
        Re::Alt(alts) => alts.iter().flat_map(|a| match_from(a, t, at)).collect(),
        Re::Repeat(inner, min, unbounded) => {
            let mut out = BTreeSet::new();
            let mut frontier = BTreeSet::from([at]);
            let mut count = 0;
            loop {
                if count >= *min {
                    out.extend(frontier.iter().copied());
                }
                if (!unbounded && count == 1) || frontier.is_empty() {
                    return out;
                }
                let next: BTreeSet<usize> = frontier
                    .iter()
                    .flat_map(|&p| match_from(inner, t, p))
                    .filter(|&p| !out.contains(&p) || count < *min)
                    .collect();
                if next == frontier {
                    return out;
                }
                frontier = next;
                count += 1;
            }
        }
    }
}
