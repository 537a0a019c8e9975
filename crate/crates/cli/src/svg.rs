//! Static SVG 1.1 figure of a trajectory: `K` with the coordinate polyline on
//! the left, `T` with the momentum polyline on the right. Bodies of dimension
//! above two are drawn through the first two coordinates.

use std::fmt::Write as _;

use minkbilliard::{ConvexBody, TrajectoryRecord};

const PANEL: f64 = 360.0;
const MARGIN: f64 = 20.0;

struct Frame {
    cx: f64,
    cy: f64,
    scale: f64,
    left: f64,
}

impl Frame {
    fn fit(points: &[[f64; 2]], left: f64) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        Frame {
            cx: 0.5 * (x0 + x1),
            cy: 0.5 * (y0 + y1),
            scale: (PANEL - 2.0 * MARGIN) / span,
            left,
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            self.left + PANEL / 2.0 + (p[0] - self.cx) * self.scale,
            PANEL / 2.0 - (p[1] - self.cy) * self.scale,
        )
    }

    fn path(&self, pts: &[[f64; 2]]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn planar(v: &[f64]) -> [f64; 2] {
    [v[0], v.get(1).copied().unwrap_or(0.0)]
}

/// Outline of a body in the plane of the first two coordinates.
fn outline(body: &ConvexBody) -> Vec<[f64; 2]> {
    match body {
        ConvexBody::Ball { radius, .. } => (0..128)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 128.0;
                [radius * a.cos(), radius * a.sin()]
            })
            .collect(),
        ConvexBody::Polytope(p) if p.dim() == 2 => p.vertices().iter().map(|v| planar(v)).collect(),
        ConvexBody::Polytope(p) => {
            // Projection of a higher-dimensional body: hull of projected vertices.
            let pts: Vec<Vec<f64>> = p.vertices().iter().map(|v| planar(v).to_vec()).collect();
            match ConvexBody::from_vertices(&pts) {
                Ok(ConvexBody::Polytope(h)) => h.vertices().iter().map(|v| planar(v)).collect(),
                _ => Vec::new(),
            }
        }
    }
}

fn panel(out: &mut String, title: &str, body: Option<&ConvexBody>, nodes: &[[f64; 2]], left: f64, colour: &str) {
    let mut all = nodes.to_vec();
    let shape = body.map(outline).unwrap_or_default();
    all.extend(&shape);
    let frame = Frame::fit(&all, left);
    let _ = writeln!(out, r##"  <g>"##);
    let _ = writeln!(
        out,
        r##"    <rect x="{left:.1}" y="0" width="{PANEL}" height="{PANEL}" fill="white" stroke="#999999"/>"##
    );
    let _ = writeln!(out, r##"    <text x="{:.1}" y="16" font-family="sans-serif" font-size="13">{title}</text>"##, left + 8.0);
    if !shape.is_empty() {
        let _ = writeln!(
            out,
            r##"    <polygon points="{}" fill="#eef2f7" stroke="#333333" stroke-width="1.5"/>"##,
            frame.path(&shape)
        );
    }
    if nodes.len() > 1 {
        let _ = writeln!(
            out,
            r##"    <polygon points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"##,
            frame.path(nodes)
        );
    }
    for (i, &p) in nodes.iter().enumerate() {
        let (x, y) = frame.map(p);
        let _ = writeln!(out, r##"    <circle cx="{x:.3}" cy="{y:.3}" r="3.5" fill="{colour}"/>"##);
        let _ = writeln!(
            out,
            r##"    <text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="10">{i}</text>"##,
            x + 5.0,
            y - 5.0
        );
    }
    let _ = writeln!(out, r##"  </g>"##);
}

pub fn render(rec: &TrajectoryRecord<f64>, k: Option<&ConvexBody>, t: Option<&ConvexBody>) -> String {
    let cycle = if rec.closed { rec.period } else { rec.bounces.len() };
    let qs: Vec<[f64; 2]> = rec.bounces[..cycle].iter().map(|b| planar(&b.q)).collect();
    let ps: Vec<[f64; 2]> = rec.bounces[..cycle].iter().map(|b| planar(&b.p)).collect();
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    out.push_str("<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" \"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n");
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{PANEL}" viewBox="0 0 {w} {PANEL}">"##,
        w = 2.0 * PANEL
    );
    let _ = writeln!(
        out,
        "  <title>period {}, length {:.9}, {}</title>",
        rec.period,
        rec.length_t,
        if rec.closed { "closed" } else { "open" }
    );
    panel(&mut out, "K: coordinates", k, &qs, 0.0, "#c0392b");
    panel(&mut out, "T: momenta", t, &ps, PANEL, "#2471a3");
    out.push_str("</svg>\n");
    out
}
