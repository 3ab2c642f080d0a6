//! Name resolution: binds every attribute reference to a FROM item and checks
//! it against a schema, inferring a minimal schema when none is supplied.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::span::SourceSpan;

use super::ast::*;

/// Relation name to ordered attribute names. Names are lower-cased.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schema {
    relations: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("relation `{0}` is declared twice")]
    DuplicateRelation(String),
    #[error("attribute `{attribute}` is declared twice in relation `{relation}`")]
    DuplicateAttribute { relation: String, attribute: String },
    #[error("invalid schema document: {0}")]
    Format(String),
}

impl Schema {
    pub fn new() -> Self {
        Schema::default()
    }

    pub fn add_relation<I, S>(&mut self, name: &str, attrs: I) -> Result<(), SchemaError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.to_ascii_lowercase();
        if self.relations.contains_key(&name) {
            return Err(SchemaError::DuplicateRelation(name));
        }
        let mut list: Vec<String> = Vec::new();
        for a in attrs {
            let a = a.as_ref().to_ascii_lowercase();
            if list.contains(&a) {
                return Err(SchemaError::DuplicateAttribute {
                    relation: name,
                    attribute: a,
                });
            }
            list.push(a);
        }
        self.relations.insert(name, list);
        Ok(())
    }

    pub fn attributes(&self, relation: &str) -> Option<&[String]> {
        self.relations.get(relation).map(Vec::as_slice)
    }

    pub fn contains(&self, relation: &str, attr: &str) -> bool {
        self.attributes(relation)
            .is_some_and(|attrs| attrs.iter().any(|a| a == attr))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.relations
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Reads `{"relation": ["attr", ...], ...}`.
    pub fn from_json(text: &str) -> Result<Schema, SchemaError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| SchemaError::Format(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| SchemaError::Format("expected a JSON object".into()))?;
        let mut schema = Schema::new();
        for (rel, attrs) in obj {
            let attrs = attrs.as_array().ok_or_else(|| {
                SchemaError::Format(format!("attributes of `{rel}` must be an array"))
            })?;
            let names = attrs
                .iter()
                .map(|a| {
                    a.as_str().map(str::to_string).ok_or_else(|| {
                        SchemaError::Format(format!("attribute names of `{rel}` must be strings"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            schema.add_relation(rel, names)?;
        }
        Ok(schema)
    }

    pub fn to_json(&self) -> String {
        let map: serde_json::Map<String, serde_json::Value> = self
            .relations
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::json!(v)))
            .collect();
        serde_json::to_string_pretty(&map).expect("schema serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("unknown relation `{relation}`")]
    UnknownRelation { relation: String, span: SourceSpan },
    #[error("unknown table alias `{alias}`")]
    UnknownAlias { alias: String, span: SourceSpan },
    #[error("{}", match .relation {
        Some(r) => format!("relation `{r}` has no attribute `{attribute}`"),
        None => format!("no table in scope has attribute `{attribute}`"),
    })]
    UnknownAttribute {
        relation: Option<String>,
        attribute: String,
        span: SourceSpan,
    },
    #[error("attribute `{attribute}` is ambiguous (could belong to {})", .candidates.join(", "))]
    AmbiguousAttribute {
        attribute: String,
        candidates: Vec<String>,
        span: SourceSpan,
    },
    #[error("alias `{alias}` is used twice in the same FROM clause")]
    DuplicateAlias { alias: String, span: SourceSpan },
}

impl ResolveError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ResolveError::UnknownRelation { span, .. }
            | ResolveError::UnknownAlias { span, .. }
            | ResolveError::UnknownAttribute { span, .. }
            | ResolveError::AmbiguousAttribute { span, .. }
            | ResolveError::DuplicateAlias { span, .. } => *span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub span: SourceSpan,
    pub message: String,
}

/// One column of the query result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputColumn {
    pub from: FromId,
    pub attr: String,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedQuery {
    /// The input tree with every [`AttrRef::binding`] filled in.
    pub ast: SqlAst,
    pub schema: Schema,
    pub schema_inferred: bool,
    /// Result columns; `SELECT *` is expanded against the schema.
    pub outputs: Vec<OutputColumn>,
    pub warnings: Vec<Warning>,
}

#[derive(Clone, Debug)]
struct ScopeItem {
    id: FromId,
    alias: String,
    relation: String,
}

type Scopes = Vec<Vec<ScopeItem>>;

/// Binds attribute references. With `schema = None` a minimal schema is
/// inferred: every relation gets exactly the attributes referenced for it.
///
/// Unqualified references bind to the innermost block that exposes the
/// attribute. Without a schema, an attribute no relation is known to have
/// binds to the innermost block when that block has a single FROM item.
pub fn resolve(mut ast: SqlAst, schema: Option<&Schema>) -> Result<ResolvedQuery, ResolveError> {
    check_from_clauses(&ast, schema)?;

    let (schema, inferred) = match schema {
        Some(s) => {
            visit_refs(&mut ast, &mut Vec::new(), &mut |r, scopes| {
                bind(r, scopes, &|rel, attr| s.contains(rel, attr), false).map(|_| ())
            })?;
            (s.clone(), false)
        }
        None => {
            let mut known: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
            visit_refs(&mut ast, &mut Vec::new(), &mut |r, scopes| {
                if let Some(q) = &r.qualifier {
                    let item = lookup_alias(scopes, q)?;
                    known
                        .entry(item.relation.clone())
                        .or_default()
                        .insert(r.attr.name.clone());
                }
                Ok(())
            })?;
            let mut seen: Vec<(String, String)> = Vec::new();
            visit_refs(&mut ast, &mut Vec::new(), &mut |r, scopes| {
                let has = |rel: &str, attr: &str| known.get(rel).is_some_and(|s| s.contains(attr));
                let item = bind(r, scopes, &has, true)?;
                let pair = (item.relation, r.attr.name.clone());
                if !seen.contains(&pair) {
                    seen.push(pair);
                }
                Ok(())
            })?;
            let mut schema = Schema::new();
            let mut relations = Vec::new();
            ast.walk(&mut |b| {
                for f in &b.from {
                    if !relations.contains(&f.relation.name) {
                        relations.push(f.relation.name.clone());
                    }
                }
            });
            for rel in relations {
                let attrs = seen.iter().filter(|(r, _)| *r == rel).map(|(_, a)| a);
                schema
                    .add_relation(&rel, attrs)
                    .expect("inferred attributes are unique");
            }
            (schema, true)
        }
    };

    let outputs = match &ast.select {
        SelectList::Items(items) => items
            .iter()
            .map(|a| OutputColumn {
                from: a.binding.expect("bound above"),
                attr: a.attr.name.clone(),
                span: a.span,
            })
            .collect(),
        SelectList::Star(span) => ast
            .from
            .iter()
            .flat_map(|f| {
                schema
                    .attributes(&f.relation.name)
                    .unwrap_or_default()
                    .iter()
                    .map(|attr| OutputColumn {
                        from: f.id,
                        attr: attr.clone(),
                        span: *span,
                    })
            })
            .collect(),
    };

    let mut warnings = Vec::new();
    if !ast.distinct {
        warnings.push(Warning {
            span: ast.select_span,
            message: "SELECT without DISTINCT is interpreted with set semantics".into(),
        });
    }

    Ok(ResolvedQuery {
        ast,
        schema,
        schema_inferred: inferred,
        outputs,
        warnings,
    })
}

fn check_from_clauses(ast: &SqlAst, schema: Option<&Schema>) -> Result<(), ResolveError> {
    let mut result = Ok(());
    ast.walk(&mut |b| {
        if result.is_err() {
            return;
        }
        for (i, f) in b.from.iter().enumerate() {
            if let Some(s) = schema {
                if s.attributes(&f.relation.name).is_none() {
                    result = Err(ResolveError::UnknownRelation {
                        relation: f.relation.name.clone(),
                        span: f.relation.span,
                    });
                    return;
                }
            }
            if b.from[..i].iter().any(|g| g.alias.name == f.alias.name) {
                result = Err(ResolveError::DuplicateAlias {
                    alias: f.alias.name.clone(),
                    span: f.alias.span,
                });
                return;
            }
        }
    });
    result
}

/// Calls `f` on every attribute reference in source order, with the chain of
/// enclosing FROM scopes (outermost first).
fn visit_refs(
    block: &mut SqlAst,
    scopes: &mut Scopes,
    f: &mut impl FnMut(&mut AttrRef, &Scopes) -> Result<(), ResolveError>,
) -> Result<(), ResolveError> {
    scopes.push(
        block
            .from
            .iter()
            .map(|i| ScopeItem {
                id: i.id,
                alias: i.alias.name.clone(),
                relation: i.relation.name.clone(),
            })
            .collect(),
    );
    if let SelectList::Items(items) = &mut block.select {
        for a in items {
            f(a, scopes)?;
        }
    }
    for c in &mut block.conjuncts {
        match c {
            Conjunct::Comparison { left, right, .. } => {
                f(left, scopes)?;
                if let Operand::Attr(a) = right {
                    f(a, scopes)?;
                }
            }
            Conjunct::Exists { subquery, .. } => visit_refs(subquery, scopes, f)?,
            Conjunct::In { test, subquery, .. } => {
                f(test, scopes)?;
                visit_refs(subquery, scopes, f)?;
            }
        }
    }
    scopes.pop();
    Ok(())
}

fn lookup_alias(scopes: &Scopes, q: &Ident) -> Result<ScopeItem, ResolveError> {
    scopes
        .iter()
        .rev()
        .find_map(|level| level.iter().find(|i| i.alias == q.name))
        .cloned()
        .ok_or_else(|| ResolveError::UnknownAlias {
            alias: q.name.clone(),
            span: q.span,
        })
}

fn bind(
    r: &mut AttrRef,
    scopes: &Scopes,
    has: &dyn Fn(&str, &str) -> bool,
    inferring: bool,
) -> Result<ScopeItem, ResolveError> {
    let attr = &r.attr.name;
    let item = if let Some(q) = &r.qualifier {
        let item = lookup_alias(scopes, q)?;
        if !has(&item.relation, attr) {
            return Err(ResolveError::UnknownAttribute {
                relation: Some(item.relation),
                attribute: attr.clone(),
                span: r.attr.span,
            });
        }
        item
    } else {
        let mut found = None;
        for level in scopes.iter().rev() {
            let candidates: Vec<&ScopeItem> =
                level.iter().filter(|i| has(&i.relation, attr)).collect();
            match candidates.len() {
                0 => continue,
                1 => {
                    found = Some(candidates[0].clone());
                    break;
                }
                _ => {
                    return Err(ResolveError::AmbiguousAttribute {
                        attribute: attr.clone(),
                        candidates: candidates.iter().map(|i| i.alias.clone()).collect(),
                        span: r.span,
                    })
                }
            }
        }
        match found {
            Some(item) => item,
            None if inferring => {
                let innermost = scopes.last().expect("at least one scope");
                if innermost.len() == 1 {
                    innermost[0].clone()
                } else {
                    return Err(ResolveError::AmbiguousAttribute {
                        attribute: attr.clone(),
                        candidates: innermost.iter().map(|i| i.alias.clone()).collect(),
                        span: r.span,
                    });
                }
            }
            None => {
                return Err(ResolveError::UnknownAttribute {
                    relation: None,
                    attribute: attr.clone(),
                    span: r.span,
                })
            }
        }
    };
    r.binding = Some(item.id);
    Ok(item)
}
