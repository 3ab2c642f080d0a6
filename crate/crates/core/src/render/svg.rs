//! SVG 1.1 output. Layout units are scaled by the style's `unit_x`/`unit_y`,
//! so a layout rectangle `(x, y, w, h)` becomes the pixel rectangle
//! `(x·unit_x, y·unit_y, w·unit_x, h·unit_y)`.

use std::fmt::Write;

use crate::diagram::{EdgeKind, EdgeTarget, GroupStyle, Port, Role};
use crate::layout::{PositionedDiagram, Rect};
use crate::span::SourceSpan;

use super::StyleConfig;

pub fn to_svg(pd: &PositionedDiagram, style: &StyleConfig) -> String {
    Svg { pd, s: style }.render()
}

pub(crate) fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Shortest decimal text for a pixel value, at most two fractional digits.
fn num(v: f64) -> String {
    let s = format!("{:.2}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Svg<'a> {
    pd: &'a PositionedDiagram,
    s: &'a StyleConfig,
}

impl Svg<'_> {
    fn px(&self, r: &Rect) -> (f64, f64, f64, f64) {
        let (ux, uy) = (self.s.unit_x as f64, self.s.unit_y as f64);
        (
            r.x as f64 * ux,
            r.y as f64 * uy,
            r.width as f64 * ux,
            r.height as f64 * uy,
        )
    }

    fn span_attrs(&self, id: &str) -> String {
        match self.pd.diagram.span_map.get(id) {
            Some(SourceSpan { start, end }) => {
                format!(r#" data-span-start="{start}" data-span-end="{end}""#)
            }
            None => String::new(),
        }
    }

    fn render(&self) -> String {
        let (ux, uy) = (self.s.unit_x, self.s.unit_y);
        let (w, h) = ((self.pd.width + 2) * ux, (self.pd.height + 2) * uy);
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="{} {} {w} {h}" font-family="{}" font-size="{}" data-dialect="{}">"#,
            -ux,
            -uy,
            escape(&self.s.font_family),
            self.s.font_size,
            self.pd.diagram.dialect
        );
        let _ = writeln!(
            out,
            r#"<defs><marker id="arrowhead" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="8" markerHeight="8" orient="auto"><path d="M 0 0 L 10 5 L 0 10 z" fill="{}"/></marker></defs>"#,
            escape(&self.s.arrow_stroke)
        );
        self.groups(&mut out);
        self.edges(&mut out);
        self.nodes(&mut out);
        self.arrows(&mut out);
        out.push_str("</svg>\n");
        out
    }

    fn groups(&self, out: &mut String) {
        for (g, gl) in self.pd.diagram.groups.iter().zip(&self.pd.groups) {
            let (x, y, w, h) = self.px(&gl.rect);
            let _ = write!(
                out,
                r#"<g id="group-{}" class="group {}" data-depth="{}"{}>"#,
                escape(&g.id),
                g.style.as_str(),
                g.depth,
                self.span_attrs(&g.id)
            );
            let stroke = escape(&self.s.stroke);
            match g.style {
                GroupStyle::NotExistsDashed => {
                    let _ = write!(
                        out,
                        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{stroke}" stroke-dasharray="{}"/>"#,
                        num(x),
                        num(y),
                        num(w),
                        num(h),
                        escape(&self.s.dash_pattern)
                    );
                }
                GroupStyle::ForallDouble => {
                    let d = self.s.double_gap as f64;
                    let _ = write!(
                        out,
                        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{stroke}"/><rect class="inner" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="{stroke}"/>"#,
                        num(x),
                        num(y),
                        num(w),
                        num(h),
                        num(x + d),
                        num(y + d),
                        num(w - 2.0 * d),
                        num(h - 2.0 * d)
                    );
                }
                GroupStyle::NegationSolidShaded => {
                    let tint = escape(self.s.tint(g.shade.unwrap_or(0)));
                    let _ = write!(
                        out,
                        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{tint}" fill-opacity="{}" stroke="{stroke}"/>"#,
                        num(x),
                        num(y),
                        num(w),
                        num(h),
                        escape(&self.s.shade_opacity)
                    );
                }
            }
            out.push_str("</g>\n");
        }
    }

    fn rect_of(&self, node: &str) -> Rect {
        self.pd.node(node).map(|n| n.rect).unwrap_or_default()
    }

    fn layer_of(&self, node: &str) -> usize {
        self.pd.node(node).map_or(0, |n| n.layer)
    }

    /// Pixel y of the middle of an attribute row.
    fn row_y(&self, p: &Port) -> f64 {
        let r = self.rect_of(&p.node);
        (r.y as f64 + 1.0 + p.row as f64 + 0.5) * self.s.unit_y as f64
    }

    fn edges(&self, out: &mut String) {
        let d = &self.pd.diagram;
        let ux = self.s.unit_x as f64;
        for e in &d.edges {
            let EdgeTarget::Port(to) = &e.to else {
                continue;
            };
            let kind = match e.kind {
                EdgeKind::Output => "output",
                EdgeKind::Join => "join",
                EdgeKind::Selection => "selection",
            };
            let _ = write!(
                out,
                r#"<g id="edge-{}" class="edge {kind}"{}>"#,
                escape(&e.id),
                self.span_attrs(&e.id)
            );
            let (a, b) = (self.rect_of(&e.from.node), self.rect_of(&to.node));
            let (la, lb) = (self.layer_of(&e.from.node), self.layer_of(&to.node));
            let (y1, y2) = (self.row_y(&e.from), self.row_y(to));
            let stroke = escape(&self.s.edge_stroke);
            let (mx, my);
            if la == lb {
                // Same column: bow out to the right of both boxes.
                let x1 = a.right() as f64 * ux;
                let x2 = b.right() as f64 * ux;
                let bulge = x1.max(x2) + 3.0 * ux;
                let _ = write!(
                    out,
                    r#"<path d="M {} {} C {} {} {} {} {} {}" fill="none" stroke="{stroke}"/>"#,
                    num(x1),
                    num(y1),
                    num(bulge),
                    num(y1),
                    num(bulge),
                    num(y2),
                    num(x2),
                    num(y2)
                );
                mx = bulge - 0.75 * ux;
                my = (y1 + y2) / 2.0;
            } else {
                let (x1, x2) = if la < lb {
                    (a.right() as f64 * ux, b.x as f64 * ux)
                } else {
                    (a.x as f64 * ux, b.right() as f64 * ux)
                };
                let _ = write!(
                    out,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}"/>"#,
                    num(x1),
                    num(y1),
                    num(x2),
                    num(y2)
                );
                mx = (x1 + x2) / 2.0;
                my = (y1 + y2) / 2.0;
            }
            if let Some(op) = &e.op_label {
                let _ = write!(
                    out,
                    r#"<text class="op" x="{}" y="{}" text-anchor="middle">{}</text>"#,
                    num(mx),
                    num(my - 3.0),
                    escape(op)
                );
            }
            out.push_str("</g>\n");
        }
    }

    fn nodes(&self, out: &mut String) {
        let d = &self.pd.diagram;
        let (ux, uy) = (self.s.unit_x as f64, self.s.unit_y as f64);
        for (n, nl) in d.nodes.iter().zip(&self.pd.nodes) {
            let (x, y, w, h) = self.px(&nl.rect);
            let role = match n.role {
                Role::Output => "output",
                Role::Input => "input",
            };
            let _ = write!(
                out,
                r#"<g id="node-{}" class="table" data-role="{role}" data-layer="{}"{}>"#,
                escape(&n.id),
                nl.layer,
                self.span_attrs(&n.id)
            );
            let stroke = escape(&self.s.stroke);
            let _ = write!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="{stroke}"/>"#,
                num(x),
                num(y),
                num(w),
                num(h),
                escape(&self.s.box_fill)
            );
            let _ = write!(
                out,
                r#"<rect class="title-bar" x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="none"/>"#,
                num(x + 0.5),
                num(y + 0.5),
                num(w - 1.0),
                num(uy - 1.0),
                escape(&self.s.title_fill)
            );
            let _ = write!(
                out,
                r#"<text class="title" x="{}" y="{}" font-weight="bold">{}</text>"#,
                num(x + ux),
                num(y + 0.7 * uy),
                escape(&n.title)
            );
            if !n.attr_rows.is_empty() {
                let _ = write!(
                    out,
                    r#"<line class="separator" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}"/>"#,
                    num(x),
                    num(y + uy),
                    num(x + w),
                    num(y + uy)
                );
            }
            for r in 0..n.attr_rows.len() {
                let _ = write!(
                    out,
                    r#"<text class="row" data-row="{r}" x="{}" y="{}">{}</text>"#,
                    num(x + ux),
                    num(y + (1.7 + r as f64) * uy),
                    escape(&d.row_text(&n.id, r))
                );
            }
            out.push_str("</g>\n");
        }
    }

    fn arrows(&self, out: &mut String) {
        for a in &self.pd.diagram.arrows {
            let (x1, y1, x2, y2) = self.arrow_line(&self.rect_of(&a.from), &self.rect_of(&a.to));
            let _ = writeln!(
                out,
                r#"<line id="arrow-{}" class="arrow" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2" marker-end="url(#arrowhead)"{}/>"#,
                escape(&a.id),
                num(x1),
                num(y1),
                num(x2),
                num(y2),
                escape(&self.s.arrow_stroke),
                self.span_attrs(&a.id)
            );
        }
    }

    /// Segment between the centres of two boxes, clipped to their borders.
    fn arrow_line(&self, a: &Rect, b: &Rect) -> (f64, f64, f64, f64) {
        let (ax, ay, aw, ah) = self.px(a);
        let (bx, by, bw, bh) = self.px(b);
        let (ca, cb) = (
            (ax + aw / 2.0, ay + ah / 2.0),
            (bx + bw / 2.0, by + bh / 2.0),
        );
        let (dx, dy) = (cb.0 - ca.0, cb.1 - ca.1);
        let clip = |w: f64, h: f64| -> f64 {
            // Fraction of the centre-to-centre vector inside a w×h box.
            let tx = if dx.abs() > f64::EPSILON {
                (w / 2.0) / dx.abs()
            } else {
                f64::INFINITY
            };
            let ty = if dy.abs() > f64::EPSILON {
                (h / 2.0) / dy.abs()
            } else {
                f64::INFINITY
            };
            tx.min(ty).min(0.5)
        };
        let (ta, tb) = (clip(aw, ah), clip(bw, bh));
        (
            ca.0 + dx * ta,
            ca.1 + dy * ta,
            cb.0 - dx * tb,
            cb.1 - dy * tb,
        )
    }
}
