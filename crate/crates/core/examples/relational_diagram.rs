//! Draw a deeply nested query as a Relational Diagram and print its box tree.
//!
//! cargo run --example relational_diagram

use qviz::diagram::{build_queryvis, build_relational_diagram, Diagram};
use qviz::pipeline::compile;

const UNIQUE_TASTE: &str = include_str!("queries/unique_taste.sql");
const DEPTH4: &str = include_str!("queries/depth4.sql");

fn print_tree(d: &Diagram, parent: Option<&str>, indent: usize) {
    for g in d.groups.iter().filter(|g| g.parent.as_deref() == parent) {
        let members: Vec<String> = g
            .members
            .iter()
            .map(|m| format!("{} {}", d.node(m).unwrap().title, m))
            .collect();
        println!(
            "{:indent$}{} shade {} [{}]",
            "",
            g.id,
            g.shade.unwrap_or(0),
            members.join(", "),
        );
        print_tree(d, Some(&g.id), indent + 2);
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = compile(UNIQUE_TASTE, None)?.calculus;
    let d = build_relational_diagram(&q);
    println!(
        "unique taste: {} tables, nesting depth {}",
        d.nodes.len(),
        q.nesting_depth()
    );
    print_tree(&d, None, 2);

    // QueryVis stops at depth 3; Relational Diagrams have no limit.
    let deep = compile(DEPTH4, None)?.calculus;
    match build_queryvis(&deep, true) {
        Ok(_) => println!("\ndepth 4: queryvis accepted it"),
        Err(e) => println!("\ndepth 4: {e}"),
    }
    print_tree(&build_relational_diagram(&deep), None, 2);
    Ok(())
}
