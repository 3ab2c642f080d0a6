//! Syntax tree for the supported SQL subset.
//!
//! Identifiers are stored lower-cased; the original spelling stays reachable
//! through each node's [`SourceSpan`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::span::SourceSpan;
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CompOp {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<>")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl CompOp {
    pub const ALL: [CompOp; 6] = [
        CompOp::Eq,
        CompOp::Ne,
        CompOp::Lt,
        CompOp::Le,
        CompOp::Gt,
        CompOp::Ge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CompOp::Eq => "=",
            CompOp::Ne => "<>",
            CompOp::Lt => "<",
            CompOp::Le => "<=",
            CompOp::Gt => ">",
            CompOp::Ge => ">=",
        }
    }

    /// The operator obtained by swapping the operands: `a < b` iff `b > a`.
    pub fn flipped(self) -> CompOp {
        match self {
            CompOp::Lt => CompOp::Gt,
            CompOp::Le => CompOp::Ge,
            CompOp::Gt => CompOp::Lt,
            CompOp::Ge => CompOp::Le,
            op => op,
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, CompOp::Eq | CompOp::Ne)
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CompOp::Eq => ord == Equal,
            CompOp::Ne => ord != Equal,
            CompOp::Lt => ord == Less,
            CompOp::Le => ord != Greater,
            CompOp::Gt => ord == Greater,
            CompOp::Ge => ord != Less,
        }
    }
}

impl fmt::Display for CompOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    /// Lower-cased name.
    pub name: String,
    pub span: SourceSpan,
}

/// Identifies one FROM item across the whole query, numbered in source order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FromId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttrRef {
    pub qualifier: Option<Ident>,
    pub attr: Ident,
    pub span: SourceSpan,
    /// Filled in by name resolution.
    pub binding: Option<FromId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Attr(AttrRef),
    Const { value: Value, span: SourceSpan },
}

impl Operand {
    pub fn span(&self) -> SourceSpan {
        match self {
            Operand::Attr(a) => a.span,
            Operand::Const { span, .. } => *span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectList {
    Star(SourceSpan),
    Items(Vec<AttrRef>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FromItem {
    pub id: FromId,
    pub relation: Ident,
    /// Defaults to the relation name when no alias is written.
    pub alias: Ident,
    pub explicit_alias: bool,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conjunct {
    Comparison {
        left: AttrRef,
        op: CompOp,
        right: Operand,
        span: SourceSpan,
    },
    Exists {
        negated: bool,
        subquery: Box<SqlAst>,
        span: SourceSpan,
    },
    In {
        negated: bool,
        test: AttrRef,
        subquery: Box<SqlAst>,
        span: SourceSpan,
    },
}

impl Conjunct {
    pub fn span(&self) -> SourceSpan {
        match self {
            Conjunct::Comparison { span, .. }
            | Conjunct::Exists { span, .. }
            | Conjunct::In { span, .. } => *span,
        }
    }
}

/// One SELECT-FROM-WHERE block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqlAst {
    pub distinct: bool,
    pub select: SelectList,
    /// `select [distinct] <list>`.
    pub select_span: SourceSpan,
    pub from: Vec<FromItem>,
    pub conjuncts: Vec<Conjunct>,
    pub span: SourceSpan,
}

impl SqlAst {
    /// Visits this block and every nested subquery, outermost first.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a SqlAst)) {
        f(self);
        for c in &self.conjuncts {
            match c {
                Conjunct::Exists { subquery, .. } | Conjunct::In { subquery, .. } => {
                    subquery.walk(f)
                }
                Conjunct::Comparison { .. } => {}
            }
        }
    }

    pub fn from_item(&self, id: FromId) -> Option<&FromItem> {
        let mut found = None;
        self.walk(&mut |b| {
            if found.is_none() {
                found = b.from.iter().find(|f| f.id == id);
            }
        });
        found
    }

    /// Every span carried by the tree, in no particular order.
    pub fn spans(&self) -> Vec<SourceSpan> {
        let mut out = Vec::new();
        self.walk(&mut |b| {
            out.push(b.span);
            out.push(b.select_span);
            match &b.select {
                SelectList::Star(s) => out.push(*s),
                SelectList::Items(items) => items.iter().for_each(|a| push_attr(&mut out, a)),
            }
            for f in &b.from {
                out.extend([f.span, f.relation.span, f.alias.span]);
            }
            for c in &b.conjuncts {
                out.push(c.span());
                match c {
                    Conjunct::Comparison { left, right, .. } => {
                        push_attr(&mut out, left);
                        match right {
                            Operand::Attr(a) => push_attr(&mut out, a),
                            Operand::Const { span, .. } => out.push(*span),
                        }
                    }
                    Conjunct::In { test, .. } => push_attr(&mut out, test),
                    Conjunct::Exists { .. } => {}
                }
            }
        });
        out
    }

    /// A copy with every span zeroed, for structural comparison.
    pub fn without_spans(&self) -> SqlAst {
        let z = SourceSpan::default();
        let ident = |i: &Ident| Ident {
            name: i.name.clone(),
            span: z,
        };
        let attr = |a: &AttrRef| AttrRef {
            qualifier: a.qualifier.as_ref().map(ident),
            attr: ident(&a.attr),
            span: z,
            binding: a.binding,
        };
        SqlAst {
            distinct: self.distinct,
            select: match &self.select {
                SelectList::Star(_) => SelectList::Star(z),
                SelectList::Items(items) => SelectList::Items(items.iter().map(attr).collect()),
            },
            select_span: z,
            from: self
                .from
                .iter()
                .map(|f| FromItem {
                    id: f.id,
                    relation: ident(&f.relation),
                    alias: ident(&f.alias),
                    explicit_alias: f.explicit_alias,
                    span: z,
                })
                .collect(),
            conjuncts: self
                .conjuncts
                .iter()
                .map(|c| match c {
                    Conjunct::Comparison {
                        left, op, right, ..
                    } => Conjunct::Comparison {
                        left: attr(left),
                        op: *op,
                        right: match right {
                            Operand::Attr(a) => Operand::Attr(attr(a)),
                            Operand::Const { value, .. } => Operand::Const {
                                value: value.clone(),
                                span: z,
                            },
                        },
                        span: z,
                    },
                    Conjunct::Exists {
                        negated, subquery, ..
                    } => Conjunct::Exists {
                        negated: *negated,
                        subquery: Box::new(subquery.without_spans()),
                        span: z,
                    },
                    Conjunct::In {
                        negated,
                        test,
                        subquery,
                        ..
                    } => Conjunct::In {
                        negated: *negated,
                        test: attr(test),
                        subquery: Box::new(subquery.without_spans()),
                        span: z,
                    },
                })
                .collect(),
            span: z,
        }
    }
}

fn push_attr(out: &mut Vec<SourceSpan>, a: &AttrRef) {
    out.push(a.span);
    out.push(a.attr.span);
    if let Some(q) = &a.qualifier {
        out.push(q.span);
    }
}

impl fmt::Display for AttrRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.qualifier {
            Some(q) => write!(f, "{}.{}", q.name, self.attr.name),
            None => f.write_str(&self.attr.name),
        }
    }
}

/// Pretty-prints the block as normalized SQL that parses back to the same tree.
impl fmt::Display for SqlAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("select ")?;
        if self.distinct {
            f.write_str("distinct ")?;
        }
        match &self.select {
            SelectList::Star(_) => f.write_str("*")?,
            SelectList::Items(items) => write_list(f, items.iter())?,
        }
        f.write_str(" from ")?;
        for (i, item) in self.from.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&item.relation.name)?;
            if item.explicit_alias {
                write!(f, " {}", item.alias.name)?;
            }
        }
        for (i, c) in self.conjuncts.iter().enumerate() {
            f.write_str(if i == 0 { " where " } else { " and " })?;
            match c {
                Conjunct::Comparison {
                    left, op, right, ..
                } => {
                    write!(f, "{left} {op} ")?;
                    match right {
                        Operand::Attr(a) => write!(f, "{a}")?,
                        Operand::Const { value, .. } => write!(f, "{value}")?,
                    }
                }
                Conjunct::Exists {
                    negated, subquery, ..
                } => {
                    if *negated {
                        f.write_str("not ")?;
                    }
                    write!(f, "exists ({subquery})")?;
                }
                Conjunct::In {
                    negated,
                    test,
                    subquery,
                    ..
                } => {
                    write!(f, "{test} ")?;
                    if *negated {
                        f.write_str("not ")?;
                    }
                    write!(f, "in ({subquery})")?;
                }
            }
        }
        Ok(())
    }
}

fn write_list<'a>(
    f: &mut fmt::Formatter<'_>,
    items: impl Iterator<Item = &'a AttrRef>,
) -> fmt::Result {
    for (i, a) in items.enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}
