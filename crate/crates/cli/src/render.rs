//! SVG drawings of expansions, scanning-order sketches and labelled lattices.

use std::fmt::Write;

use arrwwid_core::recursify::{Cell, LabelledLattice};
use arrwwid_core::{Region, TileSet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error("only planar subjects can be drawn, got dimension {0}")]
    NotPlanar(usize),
    #[error("{0} tiles exceed the drawing budget of {1}")]
    TooLarge(usize, usize),
    #[error("fractal tiles are drawn from their lattice, not from a rule set")]
    Fractal,
}

/// Most shapes one drawing may contain.
pub const SHAPE_BUDGET: usize = 200_000;

#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    pub stroke_width: f64,
    pub sketch_width: f64,
    /// Fill colours, cycled by rule or label.
    pub palette: Vec<String>,
    /// Draw the polyline through tile centres in scanning order.
    pub sketch: bool,
    /// Width of the image in pixels; the height follows the aspect ratio.
    pub size: u32,
}

impl Default for RenderStyle {
    fn default() -> RenderStyle {
        RenderStyle {
            stroke_width: 1.0,
            sketch_width: 1.5,
            palette: ["#f4d35e", "#9bc1bc", "#ee964b", "#c5d86d", "#a5a5d9", "#f2b5d4", "#8fd3c4", "#e9c46a"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            sketch: false,
            size: 800,
        }
    }
}

struct Canvas {
    out: String,
    lo: (f64, f64),
    scale: f64,
    height: f64,
}

impl Canvas {
    fn new(lo: (f64, f64), hi: (f64, f64), style: &RenderStyle) -> Canvas {
        let w = (hi.0 - lo.0).max(1e-12);
        let h = (hi.1 - lo.1).max(1e-12);
        let margin = 4.0;
        let scale = (style.size as f64 - 2.0 * margin) / w;
        let height = h * scale + 2.0 * margin;
        let mut out = String::new();
        writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{:.0}" viewBox="0 0 {} {:.3}">"#,
            style.size, height, style.size, height
        )
        .unwrap();
        Canvas { out, lo: (lo.0 - margin / scale, lo.1 - margin / scale), scale, height }
    }

    /// Image coordinates, y pointing down.
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.lo.0) * self.scale, self.height - (y - self.lo.1) * self.scale)
    }

    fn polygon(&mut self, pts: &[(f64, f64)], fill: &str, stroke: f64) {
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            let (u, v) = self.map(*x, *y);
            write!(d, "{}{:.3} {:.3} ", if i == 0 { "M" } else { "L" }, u, v).unwrap();
        }
        d.push('Z');
        writeln!(self.out, r#"<path d="{d}" fill="{fill}" stroke="black" stroke-width="{stroke}"/>"#).unwrap();
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: f64) {
        let mut p = String::new();
        for (x, y) in pts {
            let (u, v) = self.map(*x, *y);
            write!(p, "{u:.3},{v:.3} ").unwrap();
        }
        writeln!(
            self.out,
            r##"<polyline points="{}" fill="none" stroke="#c0392b" stroke-width="{stroke}" stroke-linejoin="round"/>"##,
            p.trim_end()
        )
        .unwrap();
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn outline(region: &Region) -> Result<Vec<(f64, f64)>, RenderError> {
    match region {
        Region::Box(b) => {
            let (lo, hi) = (b.lo.to_f64(), b.hi.to_f64());
            Ok(vec![(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1])])
        }
        Region::Polygon(v) => Ok(v.iter().map(|p| (p[0].to_f64(), p[1].to_f64())).collect()),
        Region::Lattice(_) => Err(RenderError::Fractal),
    }
}

fn centroid(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n)
}

fn bounds(pts: impl Iterator<Item = (f64, f64)>) -> ((f64, f64), (f64, f64)) {
    pts.fold(((f64::MAX, f64::MAX), (f64::MIN, f64::MIN)), |(lo, hi), (x, y)| {
        ((lo.0.min(x), lo.1.min(y)), (hi.0.max(x), hi.1.max(y)))
    })
}

/// Tiles filled by rule, optionally with the sketch of the scanning order.
pub fn render_tileset(ts: &TileSet, style: &RenderStyle) -> Result<String, RenderError> {
    if ts.dim != 2 {
        return Err(RenderError::NotPlanar(ts.dim));
    }
    if ts.tiles.len() > SHAPE_BUDGET {
        return Err(RenderError::TooLarge(ts.tiles.len(), SHAPE_BUDGET));
    }
    let shapes: Vec<Vec<(f64, f64)>> = ts.tiles.iter().map(|t| outline(&t.region)).collect::<Result<_, _>>()?;
    let (lo, hi) = bounds(shapes.iter().flatten().copied());
    let mut c = Canvas::new(lo, hi, style);
    for (t, s) in ts.tiles.iter().zip(&shapes) {
        c.polygon(s, &style.palette[t.rule % style.palette.len()], style.stroke_width);
    }
    if style.sketch {
        let line: Vec<(f64, f64)> = ts.scan_order().iter().map(|&i| centroid(&shapes[i as usize])).collect();
        c.polyline(&line, style.sketch_width);
    }
    Ok(c.finish())
}

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

fn hex_outline(cell: &Cell) -> Vec<(f64, f64)> {
    let (x, y) = (cell[0] as f64 + cell[1] as f64 / 2.0, cell[1] as f64 * SQRT3_2);
    let r = 1.0 / 3f64.sqrt();
    (0..6)
        .map(|k| {
            let a = std::f64::consts::PI / 6.0 + k as f64 * std::f64::consts::PI / 3.0;
            (x + r * a.cos(), y + r * a.sin())
        })
        .collect()
}

fn label_colour<'a>(label: &Cell, style: &'a RenderStyle) -> &'a str {
    let h = label[0].wrapping_mul(7).wrapping_add(label[1].wrapping_mul(3)).wrapping_add(label[2].wrapping_mul(5));
    &style.palette[h.rem_euclid(style.palette.len() as i64) as usize]
}

/// Cells of a planar labelled lattice filled by label.
pub fn render_lattice(ll: &LabelledLattice, style: &RenderStyle) -> Result<String, RenderError> {
    if ll.spec.dim != 2 {
        return Err(RenderError::NotPlanar(ll.spec.dim));
    }
    if ll.cells.len() > SHAPE_BUDGET {
        return Err(RenderError::TooLarge(ll.cells.len(), SHAPE_BUDGET));
    }
    let mut cells: Vec<(&Cell, &Cell)> = ll.cells.iter().collect();
    cells.sort();
    let shapes: Vec<Vec<(f64, f64)>> = cells
        .iter()
        .map(|(c, _)| match &ll.spec.geometry {
            None => hex_outline(c),
            Some(g) => {
                let x = (g.basis[0][0] * c[0] + g.basis[1][0] * c[1]) as f64;
                let y = (g.basis[0][1] * c[0] + g.basis[1][1] * c[1]) as f64;
                let s = g.side as f64;
                vec![(x, y), (x + s, y), (x + s, y + s), (x, y + s)]
            }
        })
        .collect();
    let (lo, hi) = bounds(shapes.iter().flatten().copied());
    let mut canvas = Canvas::new(lo, hi, style);
    for ((_, label), s) in cells.iter().zip(&shapes) {
        canvas.polygon(s, label_colour(label, style), style.stroke_width * 0.25);
    }
    Ok(canvas.finish())
}
