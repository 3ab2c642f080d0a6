//! Lower SQL to relational calculus, apply the ∀-rewrite and check on random
//! databases that both forms return the same rows.
//!
//! cargo run --example calculus_oracle

use qviz::calculus::{check_equivalent, evaluate, forall_transform, Database, Equivalence};
use qviz::pipeline::compile;

const Q_ONLY: &str = include_str!("queries/q_only.sql");

const BARS: &str = r#"{
  "frequents": [{"person": "ann", "bar": "b1"}, {"person": "bob", "bar": "b2"}],
  "serves": [{"bar": "b1", "drink": "ale"}, {"bar": "b2", "drink": "ale"}, {"bar": "b2", "drink": "gin"}],
  "likes": [{"person": "ann", "drink": "ale"}, {"person": "bob", "drink": "ale"}]
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let raw = compile(Q_ONLY, None)?.calculus;
    let rewritten = forall_transform(&raw);
    println!("calculus:\n{raw}\n");
    println!("after the ∀-rewrite:\n{rewritten}\n");

    // Persons who frequent only bars serving a drink they like.
    let db = Database::from_json(BARS)?;
    for row in evaluate(&raw, &db)? {
        println!("answer: {}", row[0]);
    }

    match check_equivalent(&raw, &rewritten, 100, 4, 3, 1)? {
        Equivalence::Equivalent { trials } => println!("agree on {trials} random databases"),
        Equivalence::Differs {
            database,
            left,
            right,
        } => {
            println!("differ on {database:?}: {left:?} vs {right:?}")
        }
    }
    Ok(())
}
