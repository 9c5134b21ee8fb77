//! Deterministic SVG drawings of complexes and ε-subdivision cellulations of
//! dimension at most 2.

use std::fmt::Write as _;

use crate::cellulation::Cellulation;
use crate::complex::{Point, SimplicialComplex};
use crate::error::{Error, Result};

const SIZE: f64 = 400.0;
const MARGIN: f64 = 20.0;

/// Fill colours by flag length; length 0 is the interior cell of a simplex.
const FILLS: [&str; 4] = ["#dde6f0", "#f2c57c", "#e0805c", "#a8475a"];

/// Vertex positions: the given ones, or evenly spaced on a circle.
fn layout(k: &SimplicialComplex, positions: Option<&[[f64; 2]]>) -> Result<Vec<[f64; 2]>> {
    match positions {
        Some(p) if p.len() == k.num_vertices() => Ok(p.to_vec()),
        Some(p) => Err(Error::Malformed(format!(
            "{} positions for {} vertices",
            p.len(),
            k.num_vertices()
        ))),
        None => {
            let n = k.num_vertices().max(1) as f64;
            Ok((0..k.num_vertices())
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / n;
                    [a.cos(), a.sin()]
                })
                .collect())
        }
    }
}

/// Affine map from layout coordinates onto the canvas, y pointing up.
struct Frame {
    min: [f64; 2],
    scale: f64,
}

impl Frame {
    fn new(pos: &[[f64; 2]]) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in pos {
            for i in 0..2 {
                min[i] = min[i].min(p[i]);
                max[i] = max[i].max(p[i]);
            }
        }
        if pos.is_empty() {
            min = [0.0; 2];
            max = [1.0; 2];
        }
        let span = (max[0] - min[0]).max(max[1] - min[1]);
        let scale = if span > 0.0 { (SIZE - 2.0 * MARGIN) / span } else { 1.0 };
        Frame { min, scale }
    }

    fn place(&self, pos: &[[f64; 2]], p: &Point) -> (f64, f64) {
        let (mut x, mut y) = (0.0, 0.0);
        for (v, c) in p.iter() {
            x += c * pos[v][0];
            y += c * pos[v][1];
        }
        (
            MARGIN + (x - self.min[0]) * self.scale,
            SIZE - MARGIN - (y - self.min[1]) * self.scale,
        )
    }
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(
        out,
        "<style>.cell{{stroke:#333;stroke-width:0.6}} .dim-0{{stroke-width:1.5}} .dim-1{{fill:none;stroke-width:1.2}} .vertex{{fill:#222}}</style>"
    );
}

fn points_attr(pts: &[(f64, f64)]) -> String {
    pts.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect::<Vec<_>>().join(" ")
}

fn check_dim(k: &SimplicialComplex) -> Result<()> {
    if k.dim() > 2 {
        return Err(Error::UnsupportedDimension(k.dim()));
    }
    Ok(())
}

/// One polygon per cell, in flag order. Collar cells (positive flag length)
/// are filled by flag length; 0-cells are small diamonds.
pub fn cellulation_svg(cells: &Cellulation, positions: Option<&[[f64; 2]]>) -> Result<String> {
    let k = cells.complex();
    check_dim(k)?;
    let pos = layout(k, positions)?;
    let frame = Frame::new(&pos);
    let mut out = String::new();
    header(&mut out);
    let order = |c: usize| -> Vec<(usize, usize)> {
        let fl = &cells.flags()[c];
        match (fl.base.len(), fl.chain.len()) {
            (2, 2) => vec![(0, 0), (1, 0), (1, 1), (0, 1)],
            (a, 1) => (0..a).map(|i| (i, 0)).collect(),
            (1, m) => (0..m).map(|j| (0, j)).collect(),
            (a, m) => (0..a).flat_map(|i| (0..m).map(move |j| (i, j))).collect(),
        }
    };
    for c in 0..cells.len() {
        let fl = &cells.flags()[c];
        let im = cells.vertex_images(c);
        let mut pts: Vec<(f64, f64)> =
            order(c).into_iter().map(|(i, j)| frame.place(&pos, &im[i][j])).collect();
        if fl.dim() == 0 {
            let (x, y) = pts[0];
            pts = vec![(x - 1.5, y), (x, y - 1.5), (x + 1.5, y), (x, y + 1.5)];
        }
        let fill = FILLS[fl.length().min(FILLS.len() - 1)];
        let _ = writeln!(
            out,
            r#"<polygon class="cell dim-{} flag-{}" fill="{fill}" points="{}"><title>{}</title></polygon>"#,
            fl.dim(),
            fl.length(),
            points_attr(&pts),
            xml_escape(&fl.describe(k)),
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// One polygon per simplex of positive dimension and one dot per vertex.
pub fn complex_svg(k: &SimplicialComplex, positions: Option<&[[f64; 2]]>) -> Result<String> {
    check_dim(k)?;
    let pos = layout(k, positions)?;
    let frame = Frame::new(&pos);
    let mut out = String::new();
    header(&mut out);
    for d in (1..=k.dim()).rev() {
        for s in k.simplices_of_dim(d) {
            let pts: Vec<(f64, f64)> =
                s.vertices().iter().map(|&v| frame.place(&pos, &Point::vertex(v))).collect();
            let _ = writeln!(
                out,
                r#"<polygon class="cell dim-{d}" fill="{}" points="{}"><title>{}</title></polygon>"#,
                FILLS[0],
                points_attr(&pts),
                xml_escape(&k.fmt_simplex(s)),
            );
        }
    }
    for v in 0..k.num_vertices() {
        let (x, y) = frame.place(&pos, &Point::vertex(v));
        let _ = writeln!(
            out,
            r#"<circle class="vertex" cx="{x:.3}" cy="{y:.3}" r="3"><title>{}</title></circle>"#,
            xml_escape(k.label(v)),
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellulation::build_cellulation;
    use crate::fixtures;

    #[test]
    fn triangle_has_43_polygons() {
        let d2 = fixtures::d2();
        let cells = build_cellulation(d2.clone(), 0.1).unwrap();
        let pos = fixtures::planar_positions(&d2);
        let a = cellulation_svg(&cells, pos.as_deref()).unwrap();
        assert_eq!(a.matches("<polygon").count(), 43);
        assert_eq!(a, cellulation_svg(&cells, pos.as_deref()).unwrap());
    }

    #[test]
    fn single_vertex_is_a_dot() {
        let k = crate::complex::closure_complex(&[vec!["v"]]).unwrap();
        let s = complex_svg(&k, None).unwrap();
        assert_eq!(s.matches("<circle").count(), 1);
        assert_eq!(s.matches("<polygon").count(), 0);
    }

    #[test]
    fn three_dimensions_are_refused() {
        let k = crate::complex::closure_complex(&[vec!["a", "b", "c", "d"]]).unwrap();
        assert!(matches!(complex_svg(&k, None), Err(Error::UnsupportedDimension(3))));
    }
}
