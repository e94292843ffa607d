use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dic_core::polytope::vertices;
use dic_core::{Error, Region, Result};

const SIZE: f64 = 400.0;
const MARGIN: f64 = 50.0;

/// Writes an SVG for two-dimensional regions and a vertex CSV otherwise.
/// Returns the path actually written.
pub fn render(region: &Region, out: &Path, tol: f64) -> Result<PathBuf> {
    let vs = vertices(region, tol)?;
    if vs.is_empty() {
        return Err(Error::Infeasible);
    }
    if region.dim() == 2 {
        fs::write(out, svg(region.labels(), &vs))?;
        Ok(out.to_path_buf())
    } else {
        let path = out.with_extension("csv");
        fs::write(&path, csv(region.labels(), &vs))?;
        Ok(path)
    }
}

fn csv(labels: &[String], vs: &[Vec<f64>]) -> String {
    let mut s = labels.join(",");
    s.push('\n');
    for v in vs {
        let row: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Vertices in counter-clockwise order around their centroid.
fn hull_order(vs: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = vs.len() as f64;
    let cx = vs.iter().map(|v| v[0]).sum::<f64>() / n;
    let cy = vs.iter().map(|v| v[1]).sum::<f64>() / n;
    let mut pts: Vec<(f64, f64)> = vs.iter().map(|v| (v[0], v[1])).collect();
    pts.sort_by(|a, b| {
        let ta = (a.1 - cy).atan2(a.0 - cx);
        let tb = (b.1 - cy).atan2(b.0 - cx);
        ta.total_cmp(&tb)
    });
    pts
}

fn svg(labels: &[String], vs: &[Vec<f64>]) -> String {
    let pts = hull_order(vs);
    let extent = pts.iter().flat_map(|&(x, y)| [x, y]).fold(0.0f64, f64::max);
    let scale = if extent > 0.0 { (SIZE - 2.0 * MARGIN) / extent } else { 1.0 };
    let px = |x: f64| MARGIN + x * scale;
    let py = |y: f64| SIZE - MARGIN - y * scale;
    let origin = (px(0.0), py(0.0));

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(s, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let points: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y))).collect();
    let _ = writeln!(
        s,
        r##"  <polygon points="{}" fill="#9ecae1" fill-opacity="0.6" stroke="#08519c" stroke-width="2"/>"##,
        points.join(" ")
    );
    let _ = writeln!(
        s,
        r#"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black"/>"#,
        origin.0,
        origin.1,
        SIZE - MARGIN / 2.0,
        origin.1
    );
    let _ = writeln!(
        s,
        r#"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black"/>"#,
        origin.0,
        origin.1,
        origin.0,
        MARGIN / 2.0
    );
    let _ = writeln!(
        s,
        r#"  <text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="14">{}</text>"#,
        SIZE - MARGIN / 2.0 - 10.0,
        origin.1 + 20.0,
        labels[0]
    );
    let _ = writeln!(
        s,
        r#"  <text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="14">{}</text>"#,
        origin.0 - 35.0,
        MARGIN / 2.0 + 5.0,
        labels[1]
    );
    for &(x, y) in &pts {
        let _ = writeln!(s, r##"  <circle cx="{:.3}" cy="{:.3}" r="3" fill="#08519c"><title>({x:.4}, {y:.4})</title></circle>"##, px(x), py(y));
    }
    s.push_str("</svg>\n");
    s
}
