//! Brute-force set-semantics evaluation over small databases.
//!
//! This is the semantic oracle every normalization and rewrite is checked
//! against: root variables range over their relations, nested blocks are
//! evaluated with ordinary first-order semantics, and the result is a set.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use thiserror::Error;

use crate::sql::CompOp;
use crate::value::Value;

use super::ir::*;

pub type Tuple = BTreeMap<String, Value>;

/// Relation name to a set of tuples. NULL values are not representable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Database {
    relations: BTreeMap<String, BTreeSet<Tuple>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DatabaseError {
    #[error("NULL in {relation}.{attribute}: NULL values are not supported")]
    NullValue { relation: String, attribute: String },
    #[error("unsupported value in {relation}.{attribute}: only integers and strings are allowed")]
    UnsupportedValue { relation: String, attribute: String },
    #[error("tuples of `{0}` do not all have the same attributes")]
    InconsistentAttributes(String),
    #[error("invalid database document: {0}")]
    Format(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("database has no relation `{0}`")]
    MissingRelation(String),
    #[error("relation `{relation}` has no attribute `{attribute}`")]
    MissingAttribute { relation: String, attribute: String },
    #[error("cannot compare {left} with {right}")]
    TypeMismatch { left: Value, right: Value },
}

impl Database {
    pub fn new() -> Self {
        Database::default()
    }

    /// Declares a relation (possibly empty).
    pub fn add_relation(&mut self, name: &str) {
        self.relations.entry(name.to_ascii_lowercase()).or_default();
    }

    /// Inserts a tuple; returns false if it was already present.
    pub fn insert(&mut self, relation: &str, tuple: Tuple) -> Result<bool, DatabaseError> {
        let name = relation.to_ascii_lowercase();
        let tuple: Tuple = tuple
            .into_iter()
            .map(|(k, v)| (k.to_ascii_lowercase(), v))
            .collect();
        let set = self.relations.entry(name.clone()).or_default();
        if let Some(first) = set.iter().next() {
            if !first.keys().eq(tuple.keys()) {
                return Err(DatabaseError::InconsistentAttributes(name));
            }
        }
        Ok(set.insert(tuple))
    }

    pub fn relation(&self, name: &str) -> Option<&BTreeSet<Tuple>> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &BTreeSet<Tuple>)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Reads `{"relation": [{"attr": value, ...}, ...], ...}`.
    pub fn from_json(text: &str) -> Result<Database, DatabaseError> {
        let doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| DatabaseError::Format(e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| DatabaseError::Format("expected a JSON object".into()))?;
        let mut db = Database::new();
        for (rel, rows) in obj {
            db.add_relation(rel);
            let rows = rows
                .as_array()
                .ok_or_else(|| DatabaseError::Format(format!("`{rel}` must be an array")))?;
            for row in rows {
                let row = row.as_object().ok_or_else(|| {
                    DatabaseError::Format(format!("tuples of `{rel}` must be objects"))
                })?;
                let mut tuple = Tuple::new();
                for (attr, v) in row {
                    let value = match v {
                        serde_json::Value::Null => {
                            return Err(DatabaseError::NullValue {
                                relation: rel.clone(),
                                attribute: attr.clone(),
                            })
                        }
                        serde_json::Value::String(s) => Value::Str(s.clone()),
                        serde_json::Value::Number(n) if n.as_i64().is_some() => {
                            Value::Int(n.as_i64().unwrap())
                        }
                        _ => {
                            return Err(DatabaseError::UnsupportedValue {
                                relation: rel.clone(),
                                attribute: attr.clone(),
                            })
                        }
                    };
                    tuple.insert(attr.clone(), value);
                }
                db.insert(rel, tuple)?;
            }
        }
        Ok(db)
    }

    /// A random instance: each relation gets up to `max_tuples` distinct tuples
    /// over the given attributes, with integer values in `0..domain`.
    pub fn random<R: Rng + ?Sized>(
        relations: &BTreeMap<String, BTreeSet<String>>,
        max_tuples: usize,
        domain: i64,
        rng: &mut R,
    ) -> Database {
        let mut db = Database::new();
        for (rel, attrs) in relations {
            db.add_relation(rel);
            let n = rng.random_range(0..=max_tuples);
            for _ in 0..n {
                let tuple = attrs
                    .iter()
                    .map(|a| (a.clone(), Value::Int(rng.random_range(0..domain))))
                    .collect();
                db.insert(rel, tuple).expect("uniform attributes");
            }
        }
        db
    }
}

/// Result of a query: a set of output rows in SELECT-column order.
pub type ResultSet = BTreeSet<Vec<Value>>;

pub fn evaluate(q: &CalculusQuery, db: &Database) -> Result<ResultSet, EvalError> {
    let mut needed: BTreeMap<TableVarId, BTreeSet<&str>> = BTreeMap::new();
    for o in &q.outputs {
        needed
            .entry(o.source.var)
            .or_default()
            .insert(&o.source.attr);
    }
    for p in q.predicates() {
        needed.entry(p.left.var).or_default().insert(&p.left.attr);
        if let Term::Attr(a) = &p.right {
            needed.entry(a.var).or_default().insert(&a.attr);
        }
    }
    let mut relations = BTreeMap::new();
    for v in q.table_vars() {
        let rel = db
            .relation(&v.relation)
            .ok_or_else(|| EvalError::MissingRelation(v.relation.clone()))?;
        for attr in needed.get(&v.id).into_iter().flatten() {
            if rel.iter().any(|t| !t.contains_key(*attr)) {
                return Err(EvalError::MissingAttribute {
                    relation: v.relation.clone(),
                    attribute: attr.to_string(),
                });
            }
        }
        relations.insert(v.id, rel.iter().collect::<Vec<_>>());
    }

    let ev = Evaluator { relations };
    let mut env = Env::new();
    let mut out = ResultSet::new();
    let root = &q.root;
    ev.for_each_assignment(root, &mut env, &mut |ev, env| {
        if ev.children_hold(root, env)? {
            out.insert(
                q.outputs
                    .iter()
                    .map(|o| env.get(&o.source).clone())
                    .collect(),
            );
        }
        Ok(true)
    })?;
    Ok(out)
}

struct Env<'a> {
    bound: BTreeMap<TableVarId, &'a Tuple>,
}

impl<'a> Env<'a> {
    fn new() -> Self {
        Env {
            bound: BTreeMap::new(),
        }
    }

    fn get(&self, a: &AttrTerm) -> &'a Value {
        &self.bound[&a.var][&a.attr]
    }
}

struct Evaluator<'a> {
    relations: BTreeMap<TableVarId, Vec<&'a Tuple>>,
}

impl<'a> Evaluator<'a> {
    /// Enumerates assignments of `block`'s variables that satisfy its local
    /// predicates, calling `f` for each; `f` returns false to stop early.
    /// Returns false if stopped.
    fn for_each_assignment(
        &self,
        block: &QuantifierBlock,
        env: &mut Env<'a>,
        f: &mut dyn FnMut(&Self, &Env<'a>) -> Result<bool, EvalError>,
    ) -> Result<bool, EvalError> {
        // Check each predicate as soon as its last local variable is bound.
        let local: Vec<TableVarId> = block.table_vars.iter().map(|v| v.id).collect();
        let ready_at: Vec<Vec<&Predicate>> = (0..local.len())
            .map(|i| {
                block
                    .predicates
                    .iter()
                    .filter(|p| {
                        p.vars()
                            .filter_map(|v| local.iter().position(|l| *l == v))
                            .max()
                            .unwrap_or(0)
                            == i
                    })
                    .collect()
            })
            .collect();
        if local.is_empty() {
            for p in &block.predicates {
                if !self.holds(p, env)? {
                    return Ok(true);
                }
            }
            return f(self, env);
        }
        self.assign(&local, &ready_at, 0, env, f)
    }

    fn assign(
        &self,
        local: &[TableVarId],
        ready_at: &[Vec<&Predicate>],
        i: usize,
        env: &mut Env<'a>,
        f: &mut dyn FnMut(&Self, &Env<'a>) -> Result<bool, EvalError>,
    ) -> Result<bool, EvalError> {
        if i == local.len() {
            return f(self, env);
        }
        let var = local[i];
        for t in &self.relations[&var] {
            env.bound.insert(var, t);
            let mut ok = true;
            for p in &ready_at[i] {
                if !self.holds(p, env)? {
                    ok = false;
                    break;
                }
            }
            if ok && !self.assign(local, ready_at, i + 1, env, f)? {
                env.bound.remove(&var);
                return Ok(false);
            }
        }
        env.bound.remove(&var);
        Ok(true)
    }

    fn holds(&self, p: &Predicate, env: &Env<'a>) -> Result<bool, EvalError> {
        let left = env.get(&p.left);
        let right = match &p.right {
            Term::Attr(a) => env.get(a),
            Term::Const(c) => c,
        };
        compare(left, p.op, right)
    }

    fn children_hold(&self, block: &QuantifierBlock, env: &Env<'a>) -> Result<bool, EvalError> {
        for c in &block.children {
            let ok = match c.kind {
                BlockKind::Exists | BlockKind::Root => self.satisfiable(c, env)?,
                BlockKind::NotExists => !self.satisfiable(c, env)?,
                BlockKind::ForallImplies => self.forall_holds(c, env)?,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Some assignment satisfies the block's predicates and children.
    fn satisfiable(&self, block: &QuantifierBlock, env: &Env<'a>) -> Result<bool, EvalError> {
        let mut found = false;
        let mut scratch = Env {
            bound: env.bound.clone(),
        };
        self.for_each_assignment(block, &mut scratch, &mut |ev, e| {
            if ev.children_hold(block, e)? {
                found = true;
                return Ok(false);
            }
            Ok(true)
        })?;
        Ok(found)
    }

    /// Every assignment satisfying the hypothesis satisfies all children.
    fn forall_holds(&self, block: &QuantifierBlock, env: &Env<'a>) -> Result<bool, EvalError> {
        let mut all = true;
        let mut scratch = Env {
            bound: env.bound.clone(),
        };
        self.for_each_assignment(block, &mut scratch, &mut |ev, e| {
            if !ev.children_hold(block, e)? {
                all = false;
                return Ok(false);
            }
            Ok(true)
        })?;
        Ok(all)
    }
}

fn compare(left: &Value, op: CompOp, right: &Value) -> Result<bool, EvalError> {
    match left.compare(right) {
        Some(ord) => Ok(op.holds(ord)),
        None => Err(EvalError::TypeMismatch {
            left: left.clone(),
            right: right.clone(),
        }),
    }
}
