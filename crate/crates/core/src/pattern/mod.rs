//! Pattern identity: a canonical form that is invariant under alias renaming,
//! FROM and WHERE reordering and IN/EXISTS phrasing, its SHA-256 digest, and
//! corpus clustering by digest.
//!
//! Two queries share a pattern exactly when their labeled query graphs are
//! isomorphic after lowering and the ∀-rewrite. The graph has one node per
//! quantifier block (labeled by kind and depth), table variable (relation),
//! predicate (operator, and constant unless constants are abstracted) and
//! output column; edges connect blocks to their children, variables and
//! predicates, predicates to the attributes they compare, and outputs to
//! their source attribute.

mod graph;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calculus::{forall_transform, CalculusQuery, QuantifierBlock, TableVarId, Term};

pub use graph::{canonical_labeling, LabeledGraph};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CanonOptions {
    /// Replace every constant by `?`, so `a > 5` and `a > 7` share a pattern.
    pub abstract_constants: bool,
}

/// Deterministic text linearization of a query pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Lowercase hex SHA-256 of a [`CanonicalForm`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PatternHash(String);

impl PatternHash {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn short(&self) -> &str {
        &self.0[..12]
    }
}

impl fmt::Display for PatternHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub hash: PatternHash,
    pub members: Vec<String>,
}

/// The labeled graph pattern identity is defined on (after the ∀-rewrite).
pub fn query_graph(q: &CalculusQuery, opts: CanonOptions) -> LabeledGraph {
    graph::build(&forall_transform(q), opts.abstract_constants).graph
}

/// Table variables in canonical order: the order is the same for any two
/// pattern-identical queries, up to automorphisms of the pattern.
pub fn canonical_var_order(q: &CalculusQuery) -> Vec<TableVarId> {
    let qg = graph::build(&forall_transform(q), false);
    let perm = canonical_labeling(&qg.graph);
    let mut vars: Vec<(usize, usize)> = qg
        .var_node
        .iter()
        .map(|(&var, &node)| (perm[node], var))
        .collect();
    vars.sort();
    vars.into_iter().map(|(_, v)| TableVarId(v)).collect()
}

pub fn canonicalize(q: &CalculusQuery) -> CanonicalForm {
    canonicalize_with(q, CanonOptions::default())
}

pub fn canonicalize_with(q: &CalculusQuery, opts: CanonOptions) -> CanonicalForm {
    let q = forall_transform(q);
    let qg = graph::build(&q, opts.abstract_constants);
    let perm = canonical_labeling(&qg.graph);
    let mut by_index: Vec<(usize, usize)> = qg
        .var_node
        .iter()
        .map(|(&var, &node)| (perm[node], var))
        .collect();
    by_index.sort();
    let names: BTreeMap<usize, String> = by_index
        .iter()
        .enumerate()
        .map(|(i, &(_, var))| (var, format!("v{i}")))
        .collect();

    let mut out = String::new();
    let cols: Vec<String> = q
        .outputs
        .iter()
        .enumerate()
        .map(|(i, o)| {
            format!(
                "o{i}:{}={}.{}",
                o.name, names[&o.source.var.0], o.source.attr
            )
        })
        .collect();
    out.push_str(&format!("select {}\n", cols.join(" ")));
    out.push_str(&render_block(&q.root, &names, opts, 0));
    CanonicalForm(out)
}

fn render_block(
    b: &QuantifierBlock,
    names: &BTreeMap<usize, String>,
    opts: CanonOptions,
    indent: usize,
) -> String {
    let pad = "  ".repeat(indent);
    let mut vars: Vec<(String, &str)> = b
        .table_vars
        .iter()
        .map(|v| (names[&v.id.0].clone(), v.relation.as_str()))
        .collect();
    vars.sort_by_key(|(n, _)| n[1..].parse::<usize>().unwrap_or(usize::MAX));
    let vars: Vec<String> = vars.iter().map(|(n, r)| format!("{n}:{r}")).collect();

    let mut preds: Vec<String> = b
        .predicates
        .iter()
        .map(|p| {
            let attr = |a: &crate::calculus::AttrTerm| format!("{}.{}", names[&a.var.0], a.attr);
            match &p.right {
                Term::Const(c) => {
                    let c = if opts.abstract_constants {
                        "?".to_string()
                    } else {
                        c.to_string()
                    };
                    format!("{} {} {c}", attr(&p.left), p.op)
                }
                Term::Attr(r) => {
                    let (op, swap) = graph::normalized(p.op, true);
                    let (mut l, mut r) = if swap {
                        (attr(r), attr(&p.left))
                    } else {
                        (attr(&p.left), attr(r))
                    };
                    if op.is_symmetric() && r < l {
                        std::mem::swap(&mut l, &mut r);
                    }
                    format!("{l} {op} {r}")
                }
            }
        })
        .collect();
    preds.sort();

    let mut children: Vec<String> = b
        .children
        .iter()
        .map(|c| render_block(c, names, opts, indent + 1))
        .collect();
    children.sort();

    let mut s = format!("{pad}{} [{}] {{\n", b.kind, vars.join(" "));
    for p in preds {
        s.push_str(&format!("{pad}  {p}\n"));
    }
    for c in children {
        s.push_str(&c);
    }
    s.push_str(&format!("{pad}}}\n"));
    s
}

pub fn pattern_hash(q: &CalculusQuery) -> PatternHash {
    pattern_hash_with(q, CanonOptions::default())
}

pub fn pattern_hash_with(q: &CalculusQuery, opts: CanonOptions) -> PatternHash {
    hash_form(&canonicalize_with(q, opts))
}

pub fn hash_form(form: &CanonicalForm) -> PatternHash {
    let digest = Sha256::digest(form.as_str().as_bytes());
    PatternHash(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Groups queries by pattern hash. Clusters are ordered by size (largest
/// first), then by hash; members are sorted by name.
pub fn cluster<'a, I>(queries: I, opts: CanonOptions) -> Vec<Cluster>
where
    I: IntoIterator<Item = (&'a str, &'a CalculusQuery)>,
{
    let mut groups: BTreeMap<PatternHash, Vec<String>> = BTreeMap::new();
    for (name, q) in queries {
        groups
            .entry(pattern_hash_with(q, opts))
            .or_default()
            .push(name.to_string());
    }
    let mut clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|(hash, mut members)| {
            members.sort();
            Cluster { hash, members }
        })
        .collect();
    clusters.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then_with(|| a.hash.cmp(&b.hash))
    });
    clusters
}
