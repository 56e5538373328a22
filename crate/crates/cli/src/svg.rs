//! Raw SVG for a single three-circle configuration.

use std::fmt::Write as _;

use circlepat::geometry::TripleLayout;

const LABELS: [&str; 3] = ["i", "j", "k"];
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

/// Circles, the triangle of centers, and the interior and intersection
/// angles as text labels. The y axis is flipped so `k` appears above `ij`.
pub fn render(layout: &TripleLayout) -> String {
    let c = layout.centers;
    let r = layout.radii;
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for s in 0..3 {
        x0 = x0.min(c[s][0] - r[s]);
        x1 = x1.max(c[s][0] + r[s]);
        y0 = y0.min(c[s][1] - r[s]);
        y1 = y1.max(c[s][1] + r[s]);
    }
    let pad = 0.08 * (x1 - x0).max(y1 - y0);
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let scale = 600.0 / w.max(h);
    let px = |p: [f64; 2]| ((p[0] - x0 + pad) * scale, (y1 + pad - p[1]) * scale);
    let font = 14.0;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
        w * scale,
        h * scale + 3.0 * font,
        w * scale,
        h * scale + 3.0 * font
    )
    .unwrap();
    writeln!(s, r#"  <rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for i in 0..3 {
        let (x, y) = px(c[i]);
        writeln!(
            s,
            r#"  <circle cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="{}" fill-opacity="0.12" stroke="{}" stroke-width="1.5"/>"#,
            r[i] * scale,
            COLORS[i],
            COLORS[i]
        )
        .unwrap();
    }
    let pts: Vec<String> = c
        .iter()
        .map(|&p| {
            let (x, y) = px(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    writeln!(
        s,
        r#"  <polygon points="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        pts.join(" ")
    )
    .unwrap();
    let centroid = [(c[0][0] + c[1][0] + c[2][0]) / 3.0, (c[0][1] + c[1][1] + c[2][1]) / 3.0];
    for i in 0..3 {
        let (x, y) = px(c[i]);
        writeln!(s, r#"  <circle cx="{x:.3}" cy="{y:.3}" r="2.5" fill="black"/>"#).unwrap();
        // angle label nudged towards the centroid
        let (gx, gy) = px(centroid);
        let (lx, ly) = (x + 0.25 * (gx - x), y + 0.25 * (gy - y));
        writeln!(
            s,
            r#"  <text x="{lx:.3}" y="{ly:.3}" font-family="sans-serif" font-size="{font}" text-anchor="middle">θ_{} = {:.4}</text>"#,
            LABELS[i],
            layout.angles[i]
        )
        .unwrap();
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mid = px([(c[j][0] + c[k][0]) / 2.0, (c[j][1] + c[k][1]) / 2.0]);
        writeln!(
            s,
            r#"  <text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="{font}" fill="dimgray" text-anchor="middle">Φ_{} = {:.4}</text>"#,
            mid.0,
            mid.1 - 4.0,
            LABELS[i],
            layout.phi[i]
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"  <text x="8" y="{:.3}" font-family="sans-serif" font-size="{font}">r = ({:.4}, {:.4}, {:.4}); sides = ({:.6}, {:.6}, {:.6})</text>"#,
        h * scale + 2.0 * font,
        r[0],
        r[1],
        r[2],
        layout.lengths[0],
        layout.lengths[1],
        layout.lengths[2]
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}
