//! Tuple-relational-calculus representation of a query: an output table plus a
//! tree of quantifier blocks, each owning table variables and predicates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::span::SourceSpan;
use crate::sql::CompOp;
use crate::value::Value;

/// Stable across rebuilds: equals the source-order index of the FROM item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableVarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableVar {
    pub id: TableVarId,
    pub relation: String,
    /// Alias as written (or defaulted); display only, never semantic.
    pub alias: String,
    pub origin_span: SourceSpan,
    /// Attributes used by predicates or output bindings, in first-use order.
    pub referenced_attrs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttrTerm {
    pub var: TableVarId,
    pub attr: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Attr(AttrTerm),
    Const(Value),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub id: PredicateId,
    pub left: AttrTerm,
    pub op: CompOp,
    pub right: Term,
    pub span: SourceSpan,
}

impl Predicate {
    pub fn vars(&self) -> impl Iterator<Item = TableVarId> + '_ {
        let right = match &self.right {
            Term::Attr(a) => Some(a.var),
            Term::Const(_) => None,
        };
        std::iter::once(self.left.var).chain(right)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    Root,
    Exists,
    NotExists,
    /// `∀ vars [hypothesis → children]`; only produced by the ∀-rewrite.
    ForallImplies,
}

impl BlockKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BlockKind::Root => "root",
            BlockKind::Exists => "exists",
            BlockKind::NotExists => "not-exists",
            BlockKind::ForallImplies => "forall-implies",
        }
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantifierBlock {
    pub id: BlockId,
    pub kind: BlockKind,
    pub table_vars: Vec<TableVar>,
    /// For `ForallImplies` these form the hypothesis.
    pub predicates: Vec<Predicate>,
    pub children: Vec<QuantifierBlock>,
    pub depth: usize,
    pub span: SourceSpan,
}

impl QuantifierBlock {
    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a QuantifierBlock)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    pub fn walk_mut(&mut self, f: &mut impl FnMut(&mut QuantifierBlock)) {
        f(self);
        for c in &mut self.children {
            c.walk_mut(f);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputAttr {
    pub name: String,
    pub source: AttrTerm,
    pub span: SourceSpan,
}

/// Names an element of a [`CalculusQuery`] for span lookup and diagram ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementId {
    OutputTable,
    Output(usize),
    Var(TableVarId),
    Predicate(PredicateId),
    Block(BlockId),
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementId::OutputTable => f.write_str("select"),
            ElementId::Output(i) => write!(f, "o{i}"),
            ElementId::Var(v) => write!(f, "t{}", v.0),
            ElementId::Predicate(p) => write!(f, "p{}", p.0),
            ElementId::Block(b) => write!(f, "b{}", b.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CalculusQuery {
    pub outputs: Vec<OutputAttr>,
    pub root: QuantifierBlock,
    /// Span of `select [distinct] <list>`.
    pub select_span: SourceSpan,
}

impl CalculusQuery {
    pub fn blocks(&self) -> Vec<&QuantifierBlock> {
        let mut out = Vec::new();
        self.root.walk(&mut |b| out.push(b));
        out
    }

    pub fn table_vars(&self) -> Vec<&TableVar> {
        self.blocks()
            .into_iter()
            .flat_map(|b| b.table_vars.iter())
            .collect()
    }

    pub fn predicates(&self) -> Vec<&Predicate> {
        self.blocks()
            .into_iter()
            .flat_map(|b| b.predicates.iter())
            .collect()
    }

    pub fn table_var(&self, id: TableVarId) -> Option<&TableVar> {
        self.table_vars().into_iter().find(|v| v.id == id)
    }

    /// Maximum block depth; 0 for a single-block query.
    pub fn nesting_depth(&self) -> usize {
        self.blocks().iter().map(|b| b.depth).max().unwrap_or(0)
    }

    /// Source span of every element that originates from the query text.
    pub fn span_map(&self) -> BTreeMap<ElementId, SourceSpan> {
        let mut map = BTreeMap::new();
        map.insert(ElementId::OutputTable, self.select_span);
        for (i, o) in self.outputs.iter().enumerate() {
            map.insert(ElementId::Output(i), o.span);
        }
        self.root.walk(&mut |b| {
            map.insert(ElementId::Block(b.id), b.span);
            for v in &b.table_vars {
                map.insert(ElementId::Var(v.id), v.origin_span);
            }
            for p in &b.predicates {
                map.insert(ElementId::Predicate(p.id), p.span);
            }
        });
        map
    }

    /// Attributes each relation needs, across all table variables.
    pub fn relation_attributes(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for v in self.table_vars() {
            map.entry(v.relation.clone())
                .or_default()
                .extend(v.referenced_attrs.iter().cloned());
        }
        map
    }

    /// Checks that every predicate and output binding references only table
    /// variables of its own block or an enclosing one, and that block depths
    /// and kinds are consistent. Returns a description of the first violation.
    pub fn check_well_formed(&self) -> Result<(), String> {
        fn go(
            b: &QuantifierBlock,
            depth: usize,
            in_scope: &mut Vec<TableVarId>,
            seen: &mut BTreeSet<TableVarId>,
        ) -> Result<(), String> {
            if b.depth != depth {
                return Err(format!(
                    "block b{} has depth {} not {depth}",
                    b.id.0, b.depth
                ));
            }
            if (b.kind == BlockKind::Root) != (depth == 0) {
                return Err(format!(
                    "block b{} has kind {} at depth {depth}",
                    b.id.0, b.kind
                ));
            }
            if b.kind == BlockKind::ForallImplies && b.children.len() != 1 {
                return Err(format!(
                    "forall block b{} needs exactly one conclusion",
                    b.id.0
                ));
            }
            let mark = in_scope.len();
            for v in &b.table_vars {
                if !seen.insert(v.id) {
                    return Err(format!("table variable t{} appears twice", v.id.0));
                }
                in_scope.push(v.id);
            }
            for p in &b.predicates {
                if let Some(v) = p.vars().find(|v| !in_scope.contains(v)) {
                    return Err(format!(
                        "predicate p{} references t{} out of scope",
                        p.id.0, v.0
                    ));
                }
            }
            for c in &b.children {
                go(c, depth + 1, in_scope, seen)?;
            }
            in_scope.truncate(mark);
            Ok(())
        }
        let root_vars: Vec<_> = self.root.table_vars.iter().map(|v| v.id).collect();
        if let Some(o) = self
            .outputs
            .iter()
            .find(|o| !root_vars.contains(&o.source.var))
        {
            return Err(format!(
                "output `{}` is not bound to a root variable",
                o.name
            ));
        }
        go(&self.root, 0, &mut Vec::new(), &mut BTreeSet::new())
    }
}

/// Renders the query as a calculus formula, using aliases as variable names:
/// `{ q(person) | ∃f ∈ frequents [ q.person = f.person ∧ ... ] }`.
impl fmt::Display for CalculusQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: BTreeMap<TableVarId, String> = self
            .table_vars()
            .into_iter()
            .map(|v| (v.id, v.alias.clone()))
            .collect();
        let attr = |a: &AttrTerm| format!("{}.{}", names[&a.var], a.attr);
        let cols: Vec<_> = self.outputs.iter().map(|o| o.name.as_str()).collect();
        write!(f, "{{ q({}) | ", cols.join(", "))?;
        let mut conj: Vec<String> = self
            .outputs
            .iter()
            .map(|o| format!("q.{} = {}", o.name, attr(&o.source)))
            .collect();
        fn block(
            b: &QuantifierBlock,
            names: &BTreeMap<TableVarId, String>,
            attr: &dyn Fn(&AttrTerm) -> String,
            mut conj: Vec<String>,
        ) -> String {
            let (quant, neg) = match b.kind {
                BlockKind::Root | BlockKind::Exists => ("∃", ""),
                BlockKind::NotExists => ("∃", "¬"),
                BlockKind::ForallImplies => ("∀", ""),
            };
            let vars: Vec<_> = b
                .table_vars
                .iter()
                .map(|v| format!("{quant}{} ∈ {}", names[&v.id], v.relation))
                .collect();
            let preds: Vec<String> = b
                .predicates
                .iter()
                .map(|p| {
                    let right = match &p.right {
                        Term::Attr(a) => attr(a),
                        Term::Const(c) => c.to_string(),
                    };
                    format!("{} {} {}", attr(&p.left), p.op, right)
                })
                .collect();
            let nested: Vec<String> = b
                .children
                .iter()
                .map(|c| block(c, names, attr, Vec::new()))
                .collect();
            let body = if b.kind == BlockKind::ForallImplies {
                format!("{} → {}", and(&preds), and(&nested))
            } else {
                conj.extend(preds);
                conj.extend(nested);
                and(&conj)
            };
            format!("{neg}{} [{body}]", vars.join(", "))
        }
        fn and(parts: &[String]) -> String {
            if parts.is_empty() {
                "true".to_string()
            } else {
                parts.join(" ∧ ")
            }
        }
        let root = block(&self.root, &names, &attr, std::mem::take(&mut conj));
        write!(f, "{root} }}")
    }
}
