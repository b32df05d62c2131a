use std::fmt::Write as _;

use super::{LayoutResult, NodeLayout, Point, COMPOUND_HEADER};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvgOptions {
    pub margin: f64,
    pub font_size: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { margin: 20.0, font_size: 11.0 }
    }
}

/// Fixed two-decimal rendering without trailing zeros.
pub(crate) fn num(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    let r = if r == 0.0 { 0.0 } else { r };
    let s = format!("{r:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
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

/// SVG 1.1 document: one rect per node (children nested inside their
/// compound's group), one polyline per edge with an arrowhead at the declared
/// target, priority labels next to the source end. Elements appear in model
/// order, so equal layouts give equal bytes.
pub fn emit_svg(layout: &LayoutResult, options: &SvgOptions) -> String {
    let m = options.margin;
    let c = layout.canvas;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="{x} {y} {w} {h}">"#,
        w = num(c.width + 2.0 * m),
        h = num(c.height + 2.0 * m),
        x = num(c.x - m),
        y = num(c.y - m),
    );
    let _ = writeln!(out, "  <defs>");
    let _ = writeln!(
        out,
        r#"    <marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="7" markerHeight="7" orient="auto">"#
    );
    let _ = writeln!(out, r#"      <path d="M 0 0 L 10 5 L 0 10 z"/>"#);
    let _ = writeln!(out, "    </marker>");
    let _ = writeln!(out, "  </defs>");
    write_level(&mut out, layout, options, 1);
    let _ = writeln!(out, "</svg>");
    out
}

fn write_level(out: &mut String, layout: &LayoutResult, options: &SvgOptions, depth: usize) {
    let pad = "  ".repeat(depth);
    for node in &layout.nodes {
        write_node(out, node, options, depth);
    }
    for edge in &layout.edges {
        if edge.points.len() < 2 {
            continue;
        }
        let pts: Vec<String> = edge.points.iter().map(|p| format!("{},{}", num(p.x), num(p.y))).collect();
        let class = if edge.reversed { "edge backward" } else { "edge" };
        let _ = writeln!(
            out,
            r#"{pad}<polyline class="{class}" data-id="{}" points="{}" fill="none" stroke="black" marker-end="url(#arrow)"/>"#,
            escape(&edge.id),
            pts.join(" ")
        );
        if let Some(label) = edge.priority_label {
            let at = label_point(edge.points[0], edge.points[1]);
            let _ = writeln!(
                out,
                r#"{pad}<text class="priority" x="{}" y="{}" font-size="{}">{label}</text>"#,
                num(at.x),
                num(at.y),
                num(options.font_size * 0.9)
            );
        }
    }
}

fn label_point(a: Point, b: Point) -> Point {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len = dx.hypot(dy);
    let step = if len > 0.0 { 10.0_f64.min(len / 2.0) / len } else { 0.0 };
    Point::new(a.x + dx * step + 3.0, a.y + dy * step - 3.0)
}

fn write_node(out: &mut String, node: &NodeLayout, options: &SvgOptions, depth: usize) {
    let pad = "  ".repeat(depth);
    let connector = node.kind == "connector";
    let rx = if connector { node.width.min(node.height) / 2.0 } else { 4.0 };
    let fill = if connector { "black" } else { "white" };
    let _ = writeln!(
        out,
        r#"{pad}<rect class="node" data-id="{}" x="{}" y="{}" width="{}" height="{}" rx="{}" fill="{fill}" stroke="black"/>"#,
        escape(&node.id),
        num(node.x),
        num(node.y),
        num(node.width),
        num(node.height),
        num(rx)
    );
    if !connector {
        let (x, y) = match &node.children {
            Some(_) => (node.x + node.width / 2.0, node.y + COMPOUND_HEADER * 0.75),
            None => (node.x + node.width / 2.0, node.y + node.height / 2.0 + options.font_size * 0.35),
        };
        let _ = writeln!(
            out,
            r#"{pad}<text class="label" x="{}" y="{}" font-size="{}" text-anchor="middle">{}</text>"#,
            num(x),
            num(y),
            num(options.font_size),
            escape(&node.id)
        );
    }
    if let Some(children) = &node.children {
        let _ = writeln!(out, r#"{pad}<g class="children" data-parent="{}">"#, escape(&node.id));
        write_level(out, children, options, depth + 1);
        let _ = writeln!(out, "{pad}</g>");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_are_trimmed() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(1.5), "1.5");
        assert_eq!(num(-0.001), "0");
        assert_eq!(num(2.345_678), "2.35");
    }

    #[test]
    fn text_is_escaped() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
