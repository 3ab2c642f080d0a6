//! Graphviz DOT output. Table boxes are record nodes whose fields are ports
//! `r0`, `r1`, ...; groups become nested `cluster_` subgraphs. Layout is left
//! to the consumer.

use std::fmt::Write;

use crate::diagram::{Diagram, EdgeTarget, GroupStyle};

use super::StyleConfig;

/// Double-quoted DOT string. Only `"` is an escape in DOT strings; other
/// backslashes pass through to the record-label parser.
fn quote(text: &str) -> String {
    let mut out = String::from("\"");
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    if out.ends_with('\\') {
        // Keep the closing quote from reading as escaped.
        out.push(' ');
    }
    out.push('"');
    out
}

/// Escapes characters that are structural inside a record label.
fn record_field(text: &str) -> String {
    let mut out = String::new();
    for c in text.chars() {
        if matches!(c, '{' | '}' | '|' | '<' | '>' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

pub fn to_dot(d: &Diagram, style: &StyleConfig) -> String {
    let mut out = String::new();
    let font = quote(&style.font_family);
    out.push_str("digraph qviz {\n");
    let _ = writeln!(out, "  graph [rankdir=LR, fontname={font}];");
    let _ = writeln!(out, "  node [shape=record, fontname={font}, fontsize=11];");
    let _ = writeln!(out, "  edge [fontname={font}, fontsize=10];");

    let node_stmt = |out: &mut String, id: &str, indent: &str| {
        let n = d.node(id).expect("member node exists");
        let mut fields = vec![record_field(&n.title)];
        for r in 0..n.attr_rows.len() {
            fields.push(format!("<r{r}> {}", record_field(&d.row_text(id, r))));
        }
        let _ = writeln!(
            out,
            "{indent}{} [id={}, label={}];",
            quote(id),
            quote(&format!("node-{id}")),
            quote(&fields.join("|"))
        );
    };

    for n in d.nodes.iter().filter(|n| n.group.is_none()) {
        node_stmt(&mut out, &n.id, "  ");
    }
    fn cluster(
        d: &Diagram,
        style: &StyleConfig,
        id: &str,
        depth: usize,
        out: &mut String,
        node_stmt: &dyn Fn(&mut String, &str, &str),
    ) {
        let g = d.group(id).expect("group exists");
        let indent = "  ".repeat(depth + 1);
        let _ = writeln!(
            out,
            "{indent}subgraph {} {{",
            quote(&format!("cluster_{id}"))
        );
        let attrs = match g.style {
            GroupStyle::NotExistsDashed => "style=dashed".to_string(),
            GroupStyle::ForallDouble => "style=bold, penwidth=2.5".to_string(),
            GroupStyle::NegationSolidShaded => format!(
                "style=filled, fillcolor={}",
                quote(style.tint(g.shade.unwrap_or(0)))
            ),
        };
        let _ = writeln!(
            out,
            "{indent}  graph [id={}, label=\"\", {attrs}];",
            quote(&format!("group-{id}"))
        );
        for m in &g.members {
            node_stmt(out, m, &format!("{indent}  "));
        }
        for c in d.groups.iter().filter(|c| c.parent.as_deref() == Some(id)) {
            cluster(d, style, &c.id, depth + 1, out, node_stmt);
        }
        let _ = writeln!(out, "{indent}}}");
    }
    for g in d.groups.iter().filter(|g| g.parent.is_none()) {
        cluster(d, style, &g.id, 0, &mut out, &node_stmt);
    }

    for e in &d.edges {
        let from = format!("{}:r{}", quote(&e.from.node), e.from.row);
        match &e.to {
            EdgeTarget::Port(p) => {
                let label = e
                    .op_label
                    .as_ref()
                    .map(|l| format!(", label={}", quote(l)))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "  {from} -> {}:r{} [id={}, dir=none{label}];",
                    quote(&p.node),
                    p.row,
                    quote(&format!("edge-{}", e.id))
                );
            }
            // Constant comparisons are already part of the row label.
            EdgeTarget::Constant(_) => {}
        }
    }
    for a in &d.arrows {
        let _ = writeln!(
            out,
            "  {} -> {} [id={}, color={}, penwidth=2, constraint=false];",
            quote(&a.from),
            quote(&a.to),
            quote(&format!("arrow-{}", a.id)),
            quote(&style.arrow_stroke)
        );
    }
    out.push_str("}\n");
    out
}
