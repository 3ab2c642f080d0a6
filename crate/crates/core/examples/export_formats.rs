//! Export one diagram as DOT and as interchange JSON, then read the JSON back.
//!
//! cargo run --example export_formats

use qviz::pipeline::{visualize, Options};
use qviz::render::{from_interchange, to_dot, to_interchange, StyleConfig};

const Q_SOME: &str = include_str!("queries/q_some.sql");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pd = visualize(Q_SOME, None, Options::default())?.positioned;

    println!("{}", to_dot(&pd.diagram, &StyleConfig::default()));

    let json = to_interchange(&pd);
    let back = from_interchange(&json)?;
    assert_eq!(back, pd);
    println!("interchange: {} bytes, round trip exact", json.len());

    // Spans tie diagram elements back to the query text.
    for (id, span) in &pd.diagram.span_map {
        println!("  {id:<7} {:?}", &Q_SOME[span.start..span.end]);
    }
    Ok(())
}
