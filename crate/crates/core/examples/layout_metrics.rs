//! Layers, crossing counts and rectangles computed by the layout engine.
//!
//! cargo run --example layout_metrics [file.sql]

use qviz::diagram::build_relational_diagram;
use qviz::layout::{assign_coordinates, assign_layers, layer_problem, order_within_layers};
use qviz::pipeline::compile;

const DEFAULT: &str = include_str!("queries/unique_taste.sql");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sql = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let d = build_relational_diagram(&compile(&sql, None)?.calculus);

    let layers = assign_layers(&d)?;
    let problem = layer_problem(&d, &layers);
    let ordered = order_within_layers(&problem);
    println!(
        "{} layers, crossings {} -> {}",
        problem.layer_count(),
        ordered.initial_crossings,
        ordered.crossings
    );

    let pd = assign_coordinates(&d, &problem, &ordered);
    println!("canvas {} x {} units", pd.width, pd.height);
    for n in &pd.nodes {
        let r = n.rect;
        println!(
            "  {:<7} layer {} order {}  ({}, {}) {}x{}",
            n.id, n.layer, n.order, r.x, r.y, r.width, r.height
        );
    }
    for g in &pd.groups {
        let r = g.rect;
        println!("  {:<7} ({}, {}) {}x{}", g.id, r.x, r.y, r.width, r.height);
    }
    Ok(())
}
