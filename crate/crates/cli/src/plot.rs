//! SVG rendering of planar decompositions: the polytope plus one panel per
//! constant face showing its projected face and alternating Levi cone.

use anyhow::{bail, Result};

use brion_core::inner::InnerProduct;
use brion_core::levi::{levi_cone, LeviBase, VirtualCone};
use brion_core::matrix::{add_vec, scale_vec};
use brion_core::polytope::{face_lattice, FaceLattice, Polytope};
use brion_core::rat::Rat;
use brion_core::xi::{xi_decomposition, Xi};

fn f64v(v: &[Rat]) -> (f64, f64) {
    (rat_f64(&v[0]), rat_f64(&v[1]))
}

fn rat_f64(r: &Rat) -> f64 {
    let n = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let d = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    n / d
}

struct Panel {
    title: String,
    polygon: Vec<(f64, f64)>,
    face_segment: Vec<(f64, f64)>,
    rays: Vec<((f64, f64), (f64, f64), bool)>, // (from, dir, negative term)
}

/// Writes a row of panels: the polygon itself, then one panel per
/// xi-constant face with the Levi cone rays drawn from the projected apex
/// (dashed when the term carries a negative coefficient).
pub fn plot_decomposition(path: &str, p: &Polytope, xi: &Xi, ip: &InnerProduct) -> Result<()> {
    if p.ambient_dim() != 2 {
        bail!("plots are only available for planar problems");
    }
    let fl = face_lattice(p);
    let dec = xi_decomposition(&fl, xi, ip);
    let polygon = ordered_boundary(&fl);
    let mut panels = vec![Panel {
        title: "polytope".into(),
        polygon: polygon.clone(),
        face_segment: Vec::new(),
        rays: Vec::new(),
    }];
    for &f in &dec.constant_faces {
        let lc = levi_cone(&fl, f, xi, ip, LeviBase::Projected)?;
        panels.push(face_panel(&fl, f, &lc, &polygon));
    }
    let svg = render(&panels);
    std::fs::write(path, svg)?;
    Ok(())
}

fn face_panel(fl: &FaceLattice, f: usize, lc: &VirtualCone, polygon: &[(f64, f64)]) -> Panel {
    let verts = fl.face_vertices(f);
    let face_segment: Vec<(f64, f64)> = verts.iter().map(|v| f64v(v)).collect();
    let mut rays = Vec::new();
    for term in &lc.terms {
        for r in &term.cone.rays {
            let from = f64v(&lc.apex);
            let dir = f64v(&add_vec(
                &lc.apex,
                &scale_vec(&Rat::from_integer(1.into()), r),
            ));
            rays.push((from, (dir.0 - from.0, dir.1 - from.1), term.coeff < 0));
        }
    }
    Panel {
        title: format!("face {} (dim {})", f, fl.faces[f].dim),
        polygon: polygon.to_vec(),
        face_segment,
        rays,
    }
}

/// Boundary vertices in cyclic order (walk the edge graph).
fn ordered_boundary(fl: &FaceLattice) -> Vec<(f64, f64)> {
    let verts = fl.polytope.vertices();
    if fl.polytope.dim() < 2 {
        return verts.iter().map(|v| f64v(v)).collect();
    }
    let edges: Vec<Vec<usize>> = fl
        .faces_of_dim(1)
        .into_iter()
        .map(|e| fl.faces[e].vertex_ids.clone())
        .collect();
    let mut order = vec![0usize];
    let mut prev = usize::MAX;
    while order.len() < verts.len() {
        let cur = *order.last().unwrap();
        let next = edges
            .iter()
            .filter(|e| e.contains(&cur))
            .flat_map(|e| e.iter().copied())
            .find(|&v| v != cur && v != prev);
        match next {
            Some(v) => {
                prev = cur;
                order.push(v);
            }
            None => break,
        }
    }
    order.into_iter().map(|i| f64v(&verts[i])).collect()
}

fn render(panels: &[Panel]) -> String {
    let (w, h) = (240.0f64, 240.0f64);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        w * panels.len() as f64,
        h,
        w * panels.len() as f64,
        h
    ));
    // Common bounding box over all panel geometry.
    let mut lo = (f64::MAX, f64::MAX);
    let mut hi = (f64::MIN, f64::MIN);
    for p in panels {
        for &(x, y) in p.polygon.iter().chain(p.face_segment.iter()) {
            lo = (lo.0.min(x), lo.1.min(y));
            hi = (hi.0.max(x), hi.1.max(y));
        }
    }
    let span = ((hi.0 - lo.0).max(hi.1 - lo.1)).max(1.0) * 1.6;
    let scale = (w - 40.0) / span;
    let map = |pt: (f64, f64), panel_idx: usize| -> (f64, f64) {
        (
            panel_idx as f64 * w + 20.0 + (pt.0 - lo.0 + 0.3 * span) * scale * 0.8,
            h - 20.0 - (pt.1 - lo.1 + 0.3 * span) * scale * 0.8,
        )
    };
    for (i, panel) in panels.iter().enumerate() {
        let pts: Vec<String> = panel
            .polygon
            .iter()
            .map(|&pt| {
                let (x, y) = map(pt, i);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        svg.push_str(&format!(
            "<polygon points=\"{}\" fill=\"#4060c020\" stroke=\"#4060c0\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
        if panel.face_segment.len() >= 2 {
            let a = map(panel.face_segment[0], i);
            let b = map(panel.face_segment[1], i);
            svg.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#c04040\" stroke-width=\"3\"/>\n",
                a.0, a.1, b.0, b.1
            ));
        } else if panel.face_segment.len() == 1 {
            let a = map(panel.face_segment[0], i);
            svg.push_str(&format!(
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"4\" fill=\"#c04040\"/>\n",
                a.0, a.1
            ));
        }
        for &(from, dir, negative) in &panel.rays {
            let a = map(from, i);
            let tip = map((from.0 + dir.0 * 1.2, from.1 + dir.1 * 1.2), i);
            let dash = if negative {
                " stroke-dasharray=\"6,4\""
            } else {
                ""
            };
            svg.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#c04040\" stroke-width=\"1.5\"{dash}/>\n",
                a.0, a.1, tip.0, tip.1
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"18\" font-size=\"12\" font-family=\"monospace\">{}</text>\n",
            i as f64 * w + 12.0,
            panel.title
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
