//! Tuple relational calculus: lowering from resolved SQL, the ∀-rewrite and
//! a brute-force evaluator used as the semantic oracle.

mod eval;
mod forall;
mod ir;
mod lower;

pub use eval::{evaluate, Database, DatabaseError, EvalError, ResultSet, Tuple};
pub use forall::{expand_forall, forall_transform};
pub use ir::*;
pub use lower::to_calculus;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Maximum quantifier nesting depth below the root block.
pub fn nesting_depth(q: &CalculusQuery) -> usize {
    q.nesting_depth()
}

/// Outcome of a randomized equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent {
        trials: usize,
    },
    Differs {
        database: Database,
        left: ResultSet,
        right: ResultSet,
    },
}

/// Compares two queries on `trials` random databases with at most
/// `max_tuples` tuples per relation over the integer domain `0..domain`.
/// Both queries must range over the same relations.
pub fn check_equivalent(
    left: &CalculusQuery,
    right: &CalculusQuery,
    trials: usize,
    max_tuples: usize,
    domain: i64,
    seed: u64,
) -> Result<Equivalence, EvalError> {
    let mut attrs = left.relation_attributes();
    for (rel, a) in right.relation_attributes() {
        attrs.entry(rel).or_default().extend(a);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let db = Database::random(&attrs, max_tuples, domain, &mut rng);
        let l = evaluate(left, &db)?;
        let r = evaluate(right, &db)?;
        if l != r {
            return Ok(Equivalence::Differs {
                database: db,
                left: l,
                right: r,
            });
        }
    }
    Ok(Equivalence::Equivalent { trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sql::{parse, resolve};
    use crate::value::Value;
    use std::collections::BTreeSet;

    const Q_SOME: &str = "select distinct L.drinker from Likes L, Frequents F, Serves S \
        where L.drinker = F.drinker and F.bar = S.bar and L.beer = S.beer";

    const Q_ONLY: &str = "select F.person from Frequents F where not exists \
        (select * from Serves S where S.bar = F.bar and not exists \
        (select * from Likes L where L.person = F.person and S.drink = L.drink))";

    fn calc(sql: &str) -> CalculusQuery {
        to_calculus(&resolve(parse(sql).unwrap(), None).unwrap())
    }

    fn beer_db() -> Database {
        Database::from_json(
            r#"{
            "frequents": [{"person":"ann","bar":"b1"},{"person":"bob","bar":"b1"},{"person":"dan","bar":"b1"},
                          {"person":"cat","bar":"b3"}],
            "serves": [{"bar":"b1","drink":"ale"},{"bar":"b1","drink":"ipa"},
                       {"bar":"b2","drink":"ale"}],
            "likes": [{"person":"ann","drink":"ale"},{"person":"ann","drink":"ipa"},
                      {"person":"bob","drink":"ale"}]
        }"#,
        )
        .unwrap()
    }

    fn names(rs: &ResultSet) -> BTreeSet<String> {
        rs.iter()
            .map(|r| match &r[0] {
                Value::Str(s) => s.clone(),
                v => v.to_string(),
            })
            .collect()
    }

    #[test]
    fn q_some_structure() {
        let q = calc(Q_SOME);
        assert_eq!(q.root.kind, BlockKind::Root);
        assert_eq!(q.root.table_vars.len(), 3);
        assert_eq!(q.root.predicates.len(), 3);
        assert!(q.root.children.is_empty());
        assert_eq!(nesting_depth(&q), 0);
        q.check_well_formed().unwrap();
    }

    #[test]
    fn q_only_structure_and_rewrite() {
        let q = calc(Q_ONLY);
        assert_eq!(nesting_depth(&q), 2);
        let b1 = &q.root.children[0];
        assert_eq!(b1.kind, BlockKind::NotExists);
        assert_eq!(b1.children[0].kind, BlockKind::NotExists);
        let f = forall_transform(&q);
        let b1 = &f.root.children[0];
        assert_eq!(b1.kind, BlockKind::ForallImplies);
        assert_eq!(b1.children[0].kind, BlockKind::Exists);
        f.check_well_formed().unwrap();
        assert_eq!(expand_forall(&f), q);
    }

    #[test]
    fn q_only_evaluates() {
        let db = beer_db();
        // ann likes everything b1 serves, bob does not like ipa, dan likes nothing
        // and cat frequents a bar that serves nothing.
        let r = evaluate(&calc(Q_ONLY), &db).unwrap();
        assert_eq!(
            names(&r),
            ["ann", "cat"].iter().map(|s| s.to_string()).collect()
        );
        let r2 = evaluate(&forall_transform(&calc(Q_ONLY)), &db).unwrap();
        assert_eq!(r, r2);
    }

    #[test]
    fn q_some_evaluates() {
        let db = Database::from_json(
            r#"{
            "likes": [{"drinker":"ann","beer":"ale"},{"drinker":"bob","beer":"ipa"}],
            "frequents": [{"drinker":"ann","bar":"b1"},{"drinker":"bob","bar":"b1"}],
            "serves": [{"bar":"b1","beer":"ale"}]
        }"#,
        )
        .unwrap();
        let r = evaluate(&calc(Q_SOME), &db).unwrap();
        assert_eq!(names(&r), ["ann".to_string()].into_iter().collect());
    }

    #[test]
    fn rewrite_is_equivalent_on_random_databases() {
        let q = calc(Q_ONLY);
        let f = forall_transform(&q);
        assert_eq!(
            check_equivalent(&q, &f, 200, 4, 3, 7).unwrap(),
            Equivalence::Equivalent { trials: 200 }
        );
    }

    #[test]
    fn two_child_block_is_not_rewritten() {
        // ¬∃x[φ ∧ ¬∃y ψ ∧ ¬∃z χ] has two negated children; a naive rewrite into
        // ∀x[φ → ∃y ψ] ∧ ... would change meaning, so the block is left alone.
        let q = calc(
            "select distinct r.a from r where not exists (select * from s where s.a = r.a \
             and not exists (select * from t where t.b = s.b) \
             and not exists (select * from t t2 where t2.c = s.b))",
        );
        let f = forall_transform(&q);
        assert_eq!(f, q);
    }

    #[test]
    fn nested_rewrite_applies_bottom_up() {
        let q = calc(
            "select distinct r.a from r where not exists (select * from s where s.a = r.a \
             and not exists (select * from t where t.b = s.b and not exists \
             (select * from u where u.c = t.c and not exists (select * from v where v.d = u.d))))",
        );
        assert_eq!(nesting_depth(&q), 4);
        let f = forall_transform(&q);
        let kinds: Vec<BlockKind> = f.blocks().iter().map(|b| b.kind).collect();
        // The innermost pair is rewritten first; its parent pair no longer matches.
        assert_eq!(
            kinds,
            vec![
                BlockKind::Root,
                BlockKind::ForallImplies,
                BlockKind::Exists,
                BlockKind::ForallImplies,
                BlockKind::Exists
            ]
        );
        assert!(matches!(
            check_equivalent(&q, &f, 100, 3, 2, 1).unwrap(),
            Equivalence::Equivalent { .. }
        ));
        assert_eq!(expand_forall(&f), q);
    }

    #[test]
    fn in_subquery_lowers_to_exists_with_equality() {
        let q = calc("select distinct r.a from r where r.b in (select s.b from s where s.c = 1)");
        let child = &q.root.children[0];
        assert_eq!(child.kind, BlockKind::Exists);
        assert_eq!(child.predicates.len(), 2);
        let q2 = calc(
            "select distinct r.a from r where exists (select * from s where s.c = 1 and r.b = s.b)",
        );
        assert!(matches!(
            check_equivalent(&q, &q2, 100, 4, 3, 3).unwrap(),
            Equivalence::Equivalent { .. }
        ));
    }

    #[test]
    fn scope_is_respected() {
        let q = calc(Q_ONLY);
        q.check_well_formed().unwrap();
        let mut bad = q.clone();
        // Move the innermost block's predicate to the root: it now references
        // variables that are not in scope there.
        let p = bad.root.children[0].children[0].predicates.remove(0);
        bad.root.predicates.push(p);
        assert!(bad.check_well_formed().is_err());
    }

    #[test]
    fn referenced_attrs_follow_first_use() {
        let q = calc(Q_SOME);
        let l = &q.root.table_vars[0];
        assert_eq!(l.referenced_attrs, vec!["drinker", "beer"]);
        let f = &q.root.table_vars[1];
        assert_eq!(f.referenced_attrs, vec!["drinker", "bar"]);
    }

    #[test]
    fn database_rejects_null_and_mixed_shapes() {
        assert!(matches!(
            Database::from_json(r#"{"r":[{"a":null}]}"#),
            Err(DatabaseError::NullValue { .. })
        ));
        assert!(matches!(
            Database::from_json(r#"{"r":[{"a":1.5}]}"#),
            Err(DatabaseError::UnsupportedValue { .. })
        ));
        assert!(matches!(
            Database::from_json(r#"{"r":[{"a":1},{"b":2}]}"#),
            Err(DatabaseError::InconsistentAttributes(_))
        ));
        let db = Database::from_json(r#"{"r":[{"a":1},{"a":1}]}"#).unwrap();
        assert_eq!(db.relation("r").unwrap().len(), 1);
    }

    #[test]
    fn cross_type_comparison_is_an_error() {
        let q = calc("select distinct r.a from r where r.a = 'x'");
        let db = Database::from_json(r#"{"r":[{"a":1}]}"#).unwrap();
        assert!(matches!(
            evaluate(&q, &db),
            Err(EvalError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn constants_and_ordering_predicates() {
        let q = calc("select distinct r.a from r, s where r.a < s.a and s.b >= 2");
        let db =
            Database::from_json(r#"{"r":[{"a":1},{"a":5}],"s":[{"a":3,"b":2},{"a":9,"b":1}]}"#)
                .unwrap();
        let r = evaluate(&q, &db).unwrap();
        assert_eq!(r, [vec![Value::Int(1)]].into_iter().collect());
    }
}
