use std::fmt::Write;

use super::{escape_xml, DiagramModel, PanelKind, Shape, ShapeKind};

const MARGIN: i64 = 16;
const TITLE_H: i64 = 24;
const PANEL_GAP: i64 = 24;

/// Point where the segment from the shape's center towards `(tx, ty)`
/// leaves the shape outline.
fn boundary_point(shape: &Shape, tx: f64, ty: f64) -> (f64, f64) {
    let (cx, cy) = shape.center();
    let (dx, dy) = (tx - cx, ty - cy);
    if dx == 0.0 && dy == 0.0 {
        return (cx, cy);
    }
    let t = match shape.kind {
        ShapeKind::Rect => {
            let sx = if dx == 0.0 { f64::INFINITY } else { (shape.w as f64 / 2.0) / dx.abs() };
            let sy = if dy == 0.0 { f64::INFINITY } else { (shape.h as f64 / 2.0) / dy.abs() };
            sx.min(sy)
        }
        _ => (shape.w as f64 / 2.0) / (dx * dx + dy * dy).sqrt(),
    };
    (cx + dx * t, cy + dy * t)
}

fn shape_svg(out: &mut String, shape: &Shape) {
    let (cx, cy) = shape.center();
    let name = escape_xml(&shape.name);
    match shape.kind {
        ShapeKind::Rect => {
            let _ = writeln!(
                out,
                r#"<rect class="proposition" data-node="{name}" x="{}" y="{}" width="{}" height="{}" fill="white" stroke="black"/>"#,
                shape.x, shape.y, shape.w, shape.h
            );
            let _ = writeln!(
                out,
                r#"<text x="{cx:.1}" y="{cy:.1}" text-anchor="middle" dominant-baseline="central">{}</text>"#,
                escape_xml(&shape.label)
            );
        }
        ShapeKind::SolidCircle | ShapeKind::HollowCircle | ShapeKind::PlusCircle => {
            let r = shape.w as f64 / 2.0;
            let (class, fill) = match (shape.kind, shape.relation) {
                (ShapeKind::SolidCircle, _) => ("support", "black"),
                (ShapeKind::HollowCircle, _) => ("attack", "white"),
                (_, Some(crate::graph::RelationKind::Match)) => ("plus match", "white"),
                _ => ("plus joint", "white"),
            };
            let _ = writeln!(
                out,
                r#"<circle class="{class}" data-node="{name}" cx="{cx:.1}" cy="{cy:.1}" r="{r:.1}" fill="{fill}" stroke="black"/>"#
            );
            if shape.kind == ShapeKind::PlusCircle {
                let _ = writeln!(
                    out,
                    r#"<text x="{cx:.1}" y="{cy:.1}" text-anchor="middle" dominant-baseline="central">+</text>"#
                );
            }
        }
    }
}

/// Renders all panels stacked top to bottom in one standalone SVG
/// document. Output depends only on the models.
pub fn emit_svg(models: &[DiagramModel]) -> String {
    let width = models.iter().map(|m| m.width).max().unwrap_or(0) + if models.is_empty() { 0 } else { 2 * MARGIN };
    let height: i64 = if models.is_empty() {
        0
    } else {
        models.iter().map(|m| m.height + TITLE_H + PANEL_GAP).sum::<i64>() + 2 * MARGIN - PANEL_GAP
    };

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="14">"#
    );
    if !models.is_empty() {
        out.push_str("<defs>\n");
        out.push_str(r#"<marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="8" markerHeight="8" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="black"/></marker>"#);
        out.push_str("\n</defs>\n");
    }

    let mut offset = MARGIN;
    let mut argument_no = 0;
    for (i, model) in models.iter().enumerate() {
        let (class, title) = match model.panel {
            PanelKind::Argument => {
                argument_no += 1;
                ("argument", format!("Argument {argument_no}"))
            }
            PanelKind::Isolated => ("isolated", "Isolated propositions".to_string()),
        };
        let _ = writeln!(out, r#"<g class="panel {class}" id="panel-{i}" transform="translate({MARGIN},{offset})">"#);
        let _ = writeln!(out, r#"<text class="panel-title" x="0" y="16">{title}</text>"#);
        let frame_h = model.height + TITLE_H;
        let dash = if model.panel == PanelKind::Isolated { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<path class="panel-frame" d="M0,0 H{} V{} H0 Z" fill="none" stroke="gray"{dash}/>"#,
            model.width, frame_h
        );
        let _ = writeln!(out, r#"<g transform="translate(0,{TITLE_H})">"#);
        for link in &model.links {
            let (a, b) = (&model.shapes[link.from], &model.shapes[link.to]);
            let (bx, by) = b.center();
            let (ax, ay) = a.center();
            let (x1, y1) = boundary_point(a, bx, by);
            let (x2, y2) = boundary_point(b, ax, ay);
            let marker = if link.arrowed { r#" marker-end="url(#arrow)""# } else { "" };
            let _ = writeln!(
                out,
                r#"<line class="link" data-from="{}" data-to="{}" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="black"{marker}/>"#,
                escape_xml(&a.name),
                escape_xml(&b.name)
            );
        }
        for shape in &model.shapes {
            shape_svg(&mut out, shape);
        }
        out.push_str("</g>\n</g>\n");
        offset += model.height + TITLE_H + PANEL_GAP;
    }
    out.push_str("</svg>\n");
    out
}
