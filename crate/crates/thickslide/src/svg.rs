//! SVG rendering of two-dimensional pavings.
//!
//! The view box is the paving domain in user units, with `x2` negated so
//! that it increases upwards. One `rect` per entry in canonical order,
//! then the domain frame as four `line`s.

use std::fmt::Write as _;

use thickslide_core::paver::Paving;
use thickslide_core::thickset::BoxClass;

use crate::json::format_g17;

#[derive(Clone, Debug, PartialEq)]
pub struct StyleMap {
    pub inside: String,
    pub penumbra: String,
    pub outside: String,
    pub unknown: String,
    /// Cell outline width in pixels; 0 draws no outlines.
    pub stroke_width: f64,
    /// Width of the image in pixels; the height follows the domain's
    /// aspect ratio.
    pub image_width: f64,
}

impl Default for StyleMap {
    fn default() -> StyleMap {
        StyleMap {
            inside: "#d62728".into(),
            penumbra: "#ff9f1c".into(),
            outside: "#1f77b4".into(),
            unknown: "#ffe4b0".into(),
            stroke_width: 0.5,
            image_width: 800.0,
        }
    }
}

impl StyleMap {
    pub fn color(&self, class: BoxClass) -> &str {
        match class {
            BoxClass::In => &self.inside,
            BoxClass::Pen => &self.penumbra,
            BoxClass::Out => &self.outside,
            BoxClass::Unknown => &self.unknown,
        }
    }
}

#[derive(Debug, PartialEq, thiserror::Error)]
#[error("only two-dimensional pavings can be rendered, this one has dimension {0}")]
pub struct UnsupportedDimension(pub usize);

pub fn render_svg(p: &Paving, style: &StyleMap) -> Result<String, UnsupportedDimension> {
    if p.domain.dim() != 2 {
        return Err(UnsupportedDimension(p.domain.dim()));
    }
    let (dx, dy) = (p.domain[0], p.domain[1]);
    let (w, h) = (dx.hi() - dx.lo(), dy.hi() - dy.lo());
    let px_height = if w > 0.0 {
        style.image_width * h / w
    } else {
        style.image_width
    };
    let unit = if w > 0.0 { w / style.image_width } else { 1.0 };
    let g = format_g17;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        g(style.image_width),
        g(px_height),
        g(dx.lo()),
        g(-dy.hi()),
        g(w),
        g(h)
    );
    let stroke = if style.stroke_width > 0.0 {
        format!(
            r#" stroke="black" stroke-width="{}""#,
            g(style.stroke_width * unit)
        )
    } else {
        String::new()
    };
    let _ = writeln!(out, "<g{stroke}>");
    for e in &p.entries {
        let (x, y) = (e.cell[0], e.cell[1]);
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
            g(x.lo()),
            g(-y.hi()),
            g(x.hi() - x.lo()),
            g(y.hi() - y.lo()),
            style.color(e.class)
        );
    }
    let _ = writeln!(out, "</g>");
    let (x0, x1, y0, y1) = (dx.lo(), dx.hi(), -dy.hi(), -dy.lo());
    let frame_width = g(2.0 * unit);
    for (a, b, c, d) in [
        (x0, y0, x1, y0),
        (x1, y0, x1, y1),
        (x1, y1, x0, y1),
        (x0, y1, x0, y0),
    ] {
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="{frame_width}"/>"#,
            g(a),
            g(b),
            g(c),
            g(d)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
