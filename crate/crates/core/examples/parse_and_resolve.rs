//! Lex, parse and resolve a query; print the inferred schema and warnings.
//!
//! cargo run --example parse_and_resolve [file.sql]

use qviz::sql::{parse, resolve, tokenize};

const DEFAULT: &str = include_str!("queries/q_some.sql");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sql = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };

    let tokens = tokenize(&sql)?;
    println!("{} tokens", tokens.len());
    for t in tokens.iter().take(8) {
        println!("  {:<12} {:?} at {}", t.kind.to_string(), t.lexeme, t.span);
    }

    let ast = parse(&sql)?;
    println!("\nparsed back to SQL:\n  {ast}");

    let resolved = resolve(ast, None)?;
    println!(
        "\n{} schema:\n  {}",
        if resolved.schema_inferred {
            "inferred"
        } else {
            "given"
        },
        resolved.schema.to_json()
    );
    for w in &resolved.warnings {
        println!("warning at {}: {}", w.span, w.message);
    }
    Ok(())
}
