use crate::span::SourceSpan;
use crate::sql::{AttrRef, Conjunct, FromId, Operand, ResolvedQuery, SelectList, SqlAst};

use super::ir::*;

/// Lowers a resolved query to the calculus.
///
/// Each FROM item becomes a table variable of the block it is declared in;
/// `[NOT] EXISTS` opens an (not-)exists child block, and `x [NOT] IN (SELECT a ...)`
/// becomes the same child with the extra predicate `x = a`, so both phrasings
/// lower to the same structure.
pub fn to_calculus(resolved: &ResolvedQuery) -> CalculusQuery {
    let mut l = Lowerer::default();
    for o in &resolved.outputs {
        l.uses.push((o.span.start, var_of(o.from), o.attr.clone()));
    }
    let mut root = l.block(&resolved.ast, BlockKind::Root, 0, resolved.ast.span);

    l.uses.sort_by_key(|(offset, _, _)| *offset);
    root.walk_mut(&mut |b| {
        for v in &mut b.table_vars {
            for (_, var, attr) in &l.uses {
                if *var == v.id && !v.referenced_attrs.contains(attr) {
                    v.referenced_attrs.push(attr.clone());
                }
            }
        }
    });

    CalculusQuery {
        outputs: resolved
            .outputs
            .iter()
            .map(|o| OutputAttr {
                name: o.attr.clone(),
                source: AttrTerm {
                    var: var_of(o.from),
                    attr: o.attr.clone(),
                },
                span: o.span,
            })
            .collect(),
        root,
        select_span: resolved.ast.select_span,
    }
}

fn var_of(id: FromId) -> TableVarId {
    TableVarId(id.0)
}

#[derive(Default)]
struct Lowerer {
    next_block: usize,
    next_pred: usize,
    /// (source offset, variable, attribute) for every semantic reference.
    uses: Vec<(usize, TableVarId, String)>,
}

impl Lowerer {
    fn term(&mut self, a: &AttrRef) -> AttrTerm {
        let var = var_of(a.binding.expect("query is resolved"));
        self.uses.push((a.span.start, var, a.attr.name.clone()));
        AttrTerm {
            var,
            attr: a.attr.name.clone(),
        }
    }

    fn predicate(
        &mut self,
        left: AttrTerm,
        op: crate::sql::CompOp,
        right: Term,
        span: SourceSpan,
    ) -> Predicate {
        let id = PredicateId(self.next_pred);
        self.next_pred += 1;
        Predicate {
            id,
            left,
            op,
            right,
            span,
        }
    }

    fn block(
        &mut self,
        ast: &SqlAst,
        kind: BlockKind,
        depth: usize,
        span: SourceSpan,
    ) -> QuantifierBlock {
        let id = BlockId(self.next_block);
        self.next_block += 1;
        let table_vars = ast
            .from
            .iter()
            .map(|f| TableVar {
                id: var_of(f.id),
                relation: f.relation.name.clone(),
                alias: f.alias.name.clone(),
                origin_span: f.span,
                referenced_attrs: Vec::new(),
            })
            .collect();
        let mut predicates = Vec::new();
        let mut children = Vec::new();
        for c in &ast.conjuncts {
            match c {
                Conjunct::Comparison {
                    left,
                    op,
                    right,
                    span,
                } => {
                    let left = self.term(left);
                    let right = match right {
                        Operand::Attr(a) => Term::Attr(self.term(a)),
                        Operand::Const { value, .. } => Term::Const(value.clone()),
                    };
                    let p = self.predicate(left, *op, right, *span);
                    predicates.push(p);
                }
                Conjunct::Exists {
                    negated,
                    subquery,
                    span,
                } => {
                    let kind = if *negated {
                        BlockKind::NotExists
                    } else {
                        BlockKind::Exists
                    };
                    children.push(self.block(subquery, kind, depth + 1, *span));
                }
                Conjunct::In {
                    negated,
                    test,
                    subquery,
                    span,
                } => {
                    let kind = if *negated {
                        BlockKind::NotExists
                    } else {
                        BlockKind::Exists
                    };
                    let test = self.term(test);
                    let mut child = self.block(subquery, kind, depth + 1, *span);
                    let SelectList::Items(items) = &subquery.select else {
                        unreachable!("parser guarantees a single IN column")
                    };
                    let column = self.term(&items[0]);
                    let p = self.predicate(test, crate::sql::CompOp::Eq, Term::Attr(column), *span);
                    child.predicates.push(p);
                    children.push(child);
                }
            }
        }
        QuantifierBlock {
            id,
            kind,
            table_vars,
            predicates,
            children,
            depth,
            span,
        }
    }
}
