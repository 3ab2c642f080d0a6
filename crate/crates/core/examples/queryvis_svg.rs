//! Render a QueryVis diagram as SVG, with and without the ∀-rewrite.
//!
//! cargo run --example queryvis_svg [out-dir]

use std::path::PathBuf;

use qviz::diagram::{diagram_stats, Dialect};
use qviz::pipeline::{render, visualize, Format, Options};
use qviz::render::StyleConfig;

const Q_ONLY: &str = include_str!("queries/q_only.sql");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let style = StyleConfig::from_env()?;

    for forall in [false, true] {
        let opts = Options {
            dialect: Dialect::QueryVis,
            forall,
            fallback: false,
        };
        let v = visualize(Q_ONLY, None, opts)?;
        let stats = diagram_stats(&v.positioned.diagram);
        let path = out.join(if forall {
            "q_only_forall.svg"
        } else {
            "q_only.svg"
        });
        std::fs::write(&path, render(&v.positioned, Format::Svg, &style))?;
        println!(
            "{}: {} tables, {} edges, {} groups, {} arrows",
            path.display(),
            stats.nodes,
            stats.edges,
            stats.groups,
            stats.arrows
        );
    }
    Ok(())
}
