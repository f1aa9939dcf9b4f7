//! SVG rendering of a packing.

use std::fmt::Write;

use num_complex::Complex64;

use crate::moebius::CircleGeometry;
use crate::packing::Packing;

#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    pub stroke: String,
    /// Stroke width as a fraction of the larger side of the view window.
    pub stroke_fraction: f64,
    pub fill: String,
    pub background: Option<String>,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            stroke: "black".into(),
            stroke_fraction: 1e-3,
            fill: "none".into(),
            background: Some("white".into()),
        }
    }
}

/// One `<circle>` per circle and one `<line>` per line, in packing order.
///
/// The view box is the bounding box of the circles (the square `[−1, 1]²` when
/// there are none); lines are clipped to it. The `y` axis points up.
pub fn render_svg(packing: &Packing, style: &RenderStyle) -> String {
    let (lo, hi) = packing
        .bounding_box()
        .unwrap_or((Complex64::new(-1.0, -1.0), Complex64::new(1.0, 1.0)));
    let (w, h) = (hi.re - lo.re, hi.im - lo.im);
    let stroke = style.stroke_fraction * w.max(h);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        lo.re, -hi.im, w, h
    );
    if let Some(bg) = &style.background {
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{bg}"/>"#,
            lo.re, -hi.im, w, h
        );
    }
    let _ = writeln!(
        svg,
        r#"<g fill="{}" stroke="{}" stroke-width="{}">"#,
        style.fill, style.stroke, stroke
    );
    let reach = 2.0 * (w + h);
    let mid = (lo + hi) / 2.0;
    for entry in packing.iter() {
        match entry.shape {
            CircleGeometry::Circle { center, radius, .. } => {
                let _ = writeln!(svg, r#"<circle cx="{}" cy="{}" r="{}"/>"#, center.re, -center.im, radius);
            }
            CircleGeometry::Line { normal, offset } => {
                // foot of the perpendicular from the window center, then far along the line
                let foot = mid + normal * (offset - (normal.conj() * mid).re);
                let dir = normal * Complex64::i();
                let (a, b) = (foot - dir * reach, foot + dir * reach);
                let _ = writeln!(
                    svg,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                    a.re, -a.im, b.re, -b.im
                );
            }
        }
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::GeneralizedCircle;

    #[test]
    fn element_counts() {
        let mut p = Packing::new(10.0);
        for x in [0.0, 2.0, 4.0] {
            p.insert(GeneralizedCircle::from_center_radius(Complex64::new(x, 0.0), 0.5), 0, None);
        }
        p.insert(GeneralizedCircle::line(Complex64::new(0.0, 1.0), -1.0).unwrap(), 0, None);
        let svg = render_svg(&p, &RenderStyle::default());
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<line").count(), 1);
        assert!(svg.contains(r#"viewBox="-0.5 -0.5 5 1""#));
    }

    #[test]
    fn empty_packing_renders() {
        let svg = render_svg(&Packing::new(1.0), &RenderStyle::default());
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 0);
    }
}
