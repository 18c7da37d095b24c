use std::fmt::Write;

use super::{ConvexDomain, DomainError, Horosphere};

/// Triangulated graph of the horosphere over `[a2,b2] × [a3,b3]` as Wavefront OBJ.
///
/// Vertices are written as `v x₂ x₃ x₁` so that the vertical axis is the third one.
pub fn horosphere_obj(hs: &Horosphere, range2: (f64, f64), range3: (f64, f64), n: (usize, usize)) -> Result<String, DomainError> {
    graph_obj(|x2, x3| hs.height(x2, x3), &format!("horosphere {} level {}", hs.domain.name(), hs.level), range2, range3, n)
}

/// Triangulated boundary graph `x₁ = h(x₂, x₃)` as Wavefront OBJ (same layout).
pub fn boundary_obj(
    dom: &ConvexDomain,
    range2: (f64, f64),
    range3: (f64, f64),
    n: (usize, usize),
) -> Result<String, DomainError> {
    graph_obj(|x2, x3| dom.boundary_value(x2, x3), &format!("boundary {}", dom.name()), range2, range3, n)
}

fn graph_obj(
    height: impl Fn(f64, f64) -> Result<f64, DomainError>,
    title: &str,
    range2: (f64, f64),
    range3: (f64, f64),
    (n2, n3): (usize, usize),
) -> Result<String, DomainError> {
    if n2 < 2 || n3 < 2 {
        return Err(DomainError::InvalidParameter("mesh needs at least 2×2 vertices".into()));
    }
    let mut out = String::new();
    writeln!(out, "# {title}").ok();
    for i in 0..n2 {
        let x2 = lerp(range2, i, n2);
        for j in 0..n3 {
            let x3 = lerp(range3, j, n3);
            let x1 = height(x2, x3)?;
            writeln!(out, "v {x2:.9} {x3:.9} {x1:.9}").ok();
        }
    }
    let idx = |i: usize, j: usize| i * n3 + j + 1;
    for i in 0..n2 - 1 {
        for j in 0..n3 - 1 {
            writeln!(out, "f {} {} {}", idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)).ok();
            writeln!(out, "f {} {} {}", idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)).ok();
        }
    }
    Ok(out)
}

fn lerp((a, b): (f64, f64), i: usize, n: usize) -> f64 {
    a + (b - a) * i as f64 / (n - 1) as f64
}

/// SVG polyline of the slice `{x₁ = h + κ} ∩ {x₃ = const}` for `x₂` in `range2`.
pub fn horosphere_slice_svg(hs: &Horosphere, x3: f64, range2: (f64, f64), samples: usize) -> Result<String, DomainError> {
    if samples < 2 {
        return Err(DomainError::InvalidParameter("slice needs at least 2 samples".into()));
    }
    let pts: Vec<(f64, f64)> = (0..samples)
        .map(|i| {
            let x2 = lerp(range2, i, samples);
            hs.height(x2, x3).map(|x1| (x2, x1))
        })
        .collect::<Result<_, _>>()?;
    let title = format!("{} level {} at x3 = {}", hs.domain.name(), hs.level, x3);
    Ok(polyline_svg(&title, "x2", "x1", &[(pts, "#1f4e9c")]))
}

/// Minimal static SVG line plot; axes are fitted to the data.
pub fn polyline_svg(title: &str, xlabel: &str, ylabel: &str, series: &[(Vec<(f64, f64)>, &str)]) -> String {
    let (w, h, pad) = (640.0, 420.0, 50.0);
    let all: Vec<&(f64, f64)> =
        series.iter().flat_map(|(p, _)| p.iter()).filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &all {
        xmin = xmin.min(p.0);
        xmax = xmax.max(p.0);
        ymin = ymin.min(p.1);
        ymax = ymax.max(p.1);
    }
    if !(xmax > xmin) {
        xmax = xmin + 1.0;
    }
    if !(ymax > ymin) {
        ymax = ymin + 1.0;
    }
    let sx = |x: f64| pad + (x - xmin) / (xmax - xmin) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - ymin) / (ymax - ymin) * (h - 2.0 * pad);
    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).ok();
    writeln!(out, r#"<title>{}</title>"#, escape(title)).ok();
    writeln!(out, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##).ok();
    writeln!(
        out,
        r##"<path d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2}" fill="none" stroke="#000000"/>"##,
        pad,
        pad,
        pad,
        h - pad,
        w - pad,
        h - pad
    )
    .ok();
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 12.0,
        escape(xlabel)
    )
    .ok();
    writeln!(
        out,
        r#"<text x="14" y="{:.2}" font-size="12" transform="rotate(-90 14 {:.2})" text-anchor="middle">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(ylabel)
    )
    .ok();
    writeln!(out, r#"<text x="{:.2}" y="20" font-size="13" text-anchor="middle">{}</text>"#, w / 2.0, escape(title)).ok();
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="10">{:.4}</text>"#, pad, h - pad + 14.0, xmin).ok();
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{:.4}</text>"#, w - pad, h - pad + 14.0, xmax)
        .ok();
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{:.4}</text>"#, pad - 4.0, h - pad, ymin).ok();
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{:.4}</text>"#, pad - 4.0, pad + 4.0, ymax).ok();
    for (pts, color) in series {
        let coords: Vec<String> = pts
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y)))
            .collect();
        writeln!(out, r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#, coords.join(" "), color).ok();
        for c in &coords {
            let (cx, cy) = c.split_once(',').unwrap_or(("0", "0"));
            writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>"#).ok();
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
