//! Region export. CSV keeps exact rationals; SVG is for looking at and
//! uses floating point.

use std::fmt::Write as _;

use ice_lab::ice::Point;
use ice_lab::rational::to_f64;

use crate::commands::RegionKind;

/// One `p/q,p/q` vertex per line, counterclockwise from the
/// lexicographically least vertex.
pub fn csv(vertices: &[Point]) -> String {
    let mut out = String::new();
    for v in vertices {
        let _ = writeln!(out, "{},{}", v.0, v.1);
    }
    out
}

fn color(kind: RegionKind) -> &'static str {
    match kind {
        RegionKind::Ice => "#1f77b4",
        RegionKind::Ce => "#2ca02c",
        RegionKind::Ir => "#ff7f0e",
        RegionKind::Nash => "#d62728",
    }
}

/// Overlay of the given regions with axes scaled to their bounding box.
pub fn svg(regions: &[(RegionKind, Vec<Point>)]) -> String {
    const SIZE: f64 = 400.0;
    const PAD: f64 = 40.0;
    let pts: Vec<(f64, f64)> = regions
        .iter()
        .flat_map(|(_, v)| v.iter().map(|p| (to_f64(&p.0), to_f64(&p.1))))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 1.0f64, 0.0f64, 1.0f64);
    if let Some(&(x, y)) = pts.first() {
        (x0, x1, y0, y1) = (x, x, y, y);
        for &(x, y) in &pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let sx = |x: f64| PAD + (x - x0) / span * (SIZE - 2.0 * PAD);
    let sy = |y: f64| SIZE - PAD - (y - y0) / span * (SIZE - 2.0 * PAD);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}" stroke="#444"/><line x1="{PAD}" y1="{b}" x2="{PAD}" y2="{PAD}" stroke="#444"/>"##,
        b = SIZE - PAD,
        r = SIZE - PAD
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="11">u1 {x0:.2}..{:.2}</text><text x="4" y="{}" font-size="11">u2 {y0:.2}..{:.2}</text>"#,
        PAD,
        SIZE - 12.0,
        x0 + span,
        PAD - 8.0,
        y0 + span
    );
    for (k, (kind, verts)) in regions.iter().enumerate() {
        let c = color(*kind);
        let coords: Vec<String> = verts
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(to_f64(&p.0)), sy(to_f64(&p.1))))
            .collect();
        match verts.len() {
            0 => {}
            1 => {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{c}"/>"#,
                    sx(to_f64(&verts[0].0)),
                    sy(to_f64(&verts[0].1))
                );
            }
            2 => {
                let _ = writeln!(out, r#"<polyline points="{}" stroke="{c}" stroke-width="3" fill="none"/>"#, coords.join(" "));
            }
            _ => {
                let _ = writeln!(
                    out,
                    r#"<polygon points="{}" fill="{c}" fill-opacity="0.2" stroke="{c}" stroke-width="2"/>"#,
                    coords.join(" ")
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.0}" y="{:.0}" font-size="12" fill="{c}">{}</text>"#,
            SIZE - PAD - 40.0,
            PAD + 14.0 * k as f64,
            kind.name()
        );
    }
    out.push_str("</svg>\n");
    out
}
