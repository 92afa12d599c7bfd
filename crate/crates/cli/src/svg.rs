//! SVG pictures of a slice polygon with its triangulation.
//!
//! One lattice unit is 40px with a 20px margin; the y axis points up. All
//! coordinates are integers, and elements are emitted in a fixed order, so
//! the output is byte-for-byte reproducible.

use std::fmt::Write;

use num_traits::ToPrimitive;
use toric_core::exactlin::{Int, PointKind};
use toric_core::fan::SlicePolytope;
use toric_core::resolve::Triangulation;

const UNIT: i64 = 40;
const MARGIN: i64 = 20;

struct Frame {
    min_x: i64,
    max_y: i64,
}

impl Frame {
    fn map(&self, p: &[Int]) -> (i64, i64) {
        let (x, y) = (coord(&p[0]), coord(&p[1]));
        (
            MARGIN + UNIT * (x - self.min_x),
            MARGIN + UNIT * (self.max_y - y),
        )
    }
}

fn coord(x: &Int) -> i64 {
    x.to_i64().expect("slice coordinates fit in i64")
}

pub fn render(p: &SlicePolytope, t: &Triangulation) -> String {
    let vertices = p.vertices();
    let xs = || vertices.iter().map(|v| coord(&v[0]));
    let ys = || vertices.iter().map(|v| coord(&v[1]));
    let (min_x, max_x) = (xs().min().unwrap_or(0), xs().max().unwrap_or(0));
    let (min_y, max_y) = (ys().min().unwrap_or(0), ys().max().unwrap_or(0));
    let frame = Frame { min_x, max_y };
    let width = 2 * MARGIN + UNIT * (max_x - min_x);
    let height = 2 * MARGIN + UNIT * (max_y - min_y);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        s,
        r##"<rect width="{width}" height="{height}" fill="#ffffff"/>"##
    );

    s.push_str("<g fill=\"#c8c8c8\">\n");
    for x in min_x..=max_x {
        for y in min_y..=max_y {
            let (px, py) = frame.map(&[Int::from(x), Int::from(y)]);
            let _ = writeln!(s, r#"<circle cx="{px}" cy="{py}" r="2"/>"#);
        }
    }
    s.push_str("</g>\n");

    s.push_str("<g stroke=\"#4a6fa5\" stroke-width=\"1.5\" fill=\"none\">\n");
    let mut edges: Vec<(usize, usize)> = t.edges().into_keys().collect();
    edges.sort_unstable();
    for (a, b) in edges {
        let (x1, y1) = frame.map(&t.points()[a]);
        let (x2, y2) = frame.map(&t.points()[b]);
        let _ = writeln!(s, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
    }
    s.push_str("</g>\n");

    if let Some(cycle) = p.vertex_cycle() {
        let pts: Vec<String> = cycle
            .iter()
            .map(|&i| {
                let (x, y) = frame.map(&vertices[i]);
                format!("{x},{y}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="none" stroke="#000000" stroke-width="2.5"/>"##,
            pts.join(" ")
        );
    }

    for q in p.points() {
        let (x, y) = frame.map(&q.coords);
        let (r, fill) = match q.kind {
            PointKind::Interior => (6, "#d1495b"),
            PointKind::Boundary => (4, "#000000"),
        };
        let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="{r}" fill="{fill}"/>"#);
    }
    s.push_str("</svg>\n");
    s
}
