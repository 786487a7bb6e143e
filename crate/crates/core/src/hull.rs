//! Brute-force convex hull facets and exact polytope volumes.
//!
//! Everything here is desk scale: facet enumeration goes over small point
//! subsets, which is comfortably exact and fast for the dimensions (<= 4)
//! and vertex counts this crate targets.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{add_vec, dot, primitive_integer, scale_vec, sub_vec, QMatrix, QVector};
use crate::rat::Rat;

/// Affine hull of a point set: (base point, basis of the parallel linear
/// subspace as matrix columns).
pub fn affine_hull(points: &[QVector]) -> (QVector, QMatrix) {
    assert!(!points.is_empty(), "affine hull of no points");
    let base = points[0].clone();
    let dim = base.len();
    let diffs: Vec<QVector> = points[1..].iter().map(|p| sub_vec(p, &base)).collect();
    let m = QMatrix::from_columns_with_dim(dim, &diffs);
    (base, m.column_basis())
}

/// Coordinates of the points in the affine frame (base, basis columns).
pub fn to_affine_coords(points: &[QVector], base: &[Rat], basis: &QMatrix) -> Vec<QVector> {
    points
        .iter()
        .map(|p| {
            basis
                .solve(&sub_vec(p, base))
                .expect("point outside affine hull")
        })
        .collect()
}

/// A facet-supporting halfspace <a, x> <= b with standard-dot pairing, plus
/// the indices of incident points.
#[derive(Clone, Debug)]
pub struct Facet {
    pub normal: QVector,
    pub offset: Rat,
    pub incident: Vec<usize>,
}

/// Facets of the convex hull of a full-dimensional point set in R^d.
///
/// Enumerates hyperplanes spanned by d-subsets of points and keeps those
/// with all points on one side. d = 0 yields no facets.
pub fn convex_hull_facets(points: &[QVector]) -> Result<Vec<Facet>> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    let d = points[0].len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let m = points.len();
    if m <= d {
        return Err(Error::Invalid("point set is not full-dimensional".into()));
    }
    let mut facets: Vec<Facet> = Vec::new();
    let mut seen: Vec<(QVector, Rat)> = Vec::new();
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        if let Some((normal, offset)) = hyperplane_through(points, &subset) {
            let mut side_pos = false;
            let mut side_neg = false;
            for p in points {
                let v = dot(&normal, p) - &offset;
                if v.is_positive() {
                    side_pos = true;
                } else if v.is_negative() {
                    side_neg = true;
                }
                if side_pos && side_neg {
                    break;
                }
            }
            if !(side_pos && side_neg) {
                // Orient outward: <a, x> <= b for all points.
                let (normal, offset) = if side_pos {
                    (scale_vec(&-Rat::one(), &normal), -offset)
                } else {
                    (normal, offset)
                };
                let key = (normal.clone(), offset.clone());
                if !seen.contains(&key) {
                    let incident: Vec<usize> = (0..m)
                        .filter(|&i| dot(&normal, &points[i]) == offset)
                        .collect();
                    // A facet needs affine rank d-1 among incident points.
                    let inc_pts: Vec<QVector> =
                        incident.iter().map(|&i| points[i].clone()).collect();
                    let (_, basis) = affine_hull(&inc_pts);
                    if basis.ncols() == d - 1 {
                        seen.push(key);
                        facets.push(Facet {
                            normal,
                            offset,
                            incident,
                        });
                    }
                }
            }
        }
        // Next d-subset in lexicographic order.
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(facets);
            }
            i -= 1;
            if subset[i] != i + m - d {
                subset[i] += 1;
                for j in i + 1..d {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Hyperplane through the given points if they span one: returns primitive
/// integer normal and offset.
fn hyperplane_through(points: &[QVector], idx: &[usize]) -> Option<(QVector, Rat)> {
    let d = points[0].len();
    let base = &points[idx[0]];
    let diffs: Vec<QVector> = idx[1..]
        .iter()
        .map(|&i| sub_vec(&points[i], base))
        .collect();
    let m = QMatrix::from_columns_with_dim(d, &diffs);
    let kernel = m.transpose().kernel();
    if kernel.ncols() != 1 {
        return None; // degenerate subset
    }
    let normal = primitive_integer(&kernel.col(0));
    let offset = dot(&normal, base);
    Some((normal, offset))
}

/// Exact volume of the convex hull of full-dimensional points in R^d,
/// via facet triangulation coned to the barycenter. Points in convex
/// position are not required; interior points are harmless.
pub fn hull_volume(points: &[QVector]) -> Result<Rat> {
    let d = points[0].len();
    if d == 0 {
        return Ok(Rat::one());
    }
    if d == 1 {
        let mut lo = points[0][0].clone();
        let mut hi = lo.clone();
        for p in points {
            if p[0] < lo {
                lo = p[0].clone();
            }
            if p[0] > hi {
                hi = p[0].clone();
            }
        }
        return Ok(hi - lo);
    }
    let center = barycenter(points);
    let facets = convex_hull_facets(points)?;
    let mut total = Rat::zero();
    for f in &facets {
        let inc: Vec<QVector> = f.incident.iter().map(|i| points[*i].clone()).collect();
        for simplex in triangulate_points(&inc)? {
            // d x d determinant of edge vectors from the barycenter.
            let cols: Vec<QVector> = simplex.iter().map(|p| sub_vec(p, &center)).collect();
            let det = QMatrix::from_columns(&cols).det();
            total += det.abs();
        }
    }
    let mut fact = Rat::one();
    for k in 2..=d {
        fact *= Rat::from_integer(k.into());
    }
    Ok(total / fact)
}

/// Triangulates the convex hull of a point set (any affine dimension k)
/// into k-simplices, each returned as k+1 points. Recursion: facets coned
/// to the first vertex of each facet... apex chosen as a hull point not on
/// the facet affine hull, concretely the barycenter fan.
pub fn triangulate_points(points: &[QVector]) -> Result<Vec<Vec<QVector>>> {
    let (base, basis) = affine_hull(points);
    let k = basis.ncols();
    if k == 0 {
        return Ok(vec![vec![points[0].clone()]]);
    }
    let coords = to_affine_coords(points, &base, &basis);
    let simplices_c = triangulate_full_dim(&coords)?;
    Ok(simplices_c
        .into_iter()
        .map(|s| {
            s.into_iter()
                .map(|c| add_vec(&base, &basis.mul_vec(&c)))
                .collect()
        })
        .collect())
}

fn barycenter(points: &[QVector]) -> QVector {
    let n = points[0].len();
    let mut c = vec![Rat::zero(); n];
    for p in points {
        c = add_vec(&c, p);
    }
    let inv = Rat::new(1.into(), (points.len() as i64).into());
    scale_vec(&inv, &c)
}

/// Triangulation of a full-dimensional hull in R^k: cone facet
/// triangulations to a fixed vertex, skipping facets containing it.
fn triangulate_full_dim(points: &[QVector]) -> Result<Vec<Vec<QVector>>> {
    let k = points[0].len();
    if k == 1 {
        let mut lo = 0;
        let mut hi = 0;
        for (i, p) in points.iter().enumerate() {
            if p[0] < points[lo][0] {
                lo = i;
            }
            if p[0] > points[hi][0] {
                hi = i;
            }
        }
        return Ok(vec![vec![points[lo].clone(), points[hi].clone()]]);
    }
    let facets = convex_hull_facets(points)?;
    // Apex: a vertex of the hull; the barycenter is interior so coning from
    // a vertex needs facet-avoidance. Use the lexicographically smallest
    // point, which is always a vertex.
    let apex = points.iter().min_by(|a, b| lex_cmp(a, b)).unwrap().clone();
    let mut simplices = Vec::new();
    for f in &facets {
        if dot(&f.normal, &apex) == f.offset {
            continue; // apex on this facet
        }
        let inc: Vec<QVector> = f.incident.iter().map(|i| points[*i].clone()).collect();
        for mut s in triangulate_points(&inc)? {
            s.push(apex.clone());
            simplices.push(s);
        }
    }
    Ok(simplices)
}

fn lex_cmp(a: &QVector, b: &QVector) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Volume of a polytope given by vertices, in the measure normalized so the
/// lattice G has covolume 1. The affine hull must be parallel to span(G).
/// A point has volume 1 by convention.
pub fn normalized_volume(vertices: &[QVector], g: &Lattice) -> Result<Rat> {
    let (base, basis) = affine_hull(vertices);
    let k = basis.ncols();
    if k != g.rank() {
        return Err(Error::DimensionMismatch(format!(
            "affine hull rank {} vs lattice rank {}",
            k,
            g.rank()
        )));
    }
    if k == 0 {
        return Ok(Rat::one());
    }
    // Express the vertices in G-coordinates; the hull must be parallel to
    // span(G) for this to be solvable.
    let mut coords = Vec::new();
    for v in vertices {
        let c = g.span_coords(&sub_vec(v, &base)).ok_or_else(|| {
            Error::DimensionMismatch("affine hull not parallel to span(G)".into())
        })?;
        coords.push(c);
    }
    hull_volume(&coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::qvec;
    use crate::rat::{rat, rat_int};

    #[test]
    fn unit_square_volume() {
        let sq = vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])];
        assert_eq!(
            normalized_volume(&sq, &Lattice::standard(2)).unwrap(),
            rat_int(1)
        );
    }

    #[test]
    fn diagonal_segment_in_its_lattice() {
        let seg = vec![qvec(&[0, 0]), qvec(&[2, 2])];
        let g = Lattice::from_basis(2, &[qvec(&[1, 1])]).unwrap();
        assert_eq!(normalized_volume(&seg, &g).unwrap(), rat_int(2));
    }

    #[test]
    fn standard_triangle_volume() {
        let tri = vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])];
        assert_eq!(
            normalized_volume(&tri, &Lattice::standard(2)).unwrap(),
            rat(1, 2)
        );
    }

    #[test]
    fn point_volume_is_one() {
        let pt = vec![vec![rat(1, 2), rat(1, 2)]];
        assert_eq!(
            normalized_volume(&pt, &Lattice::zero(2)).unwrap(),
            rat_int(1)
        );
    }

    #[test]
    fn dimension_mismatch_detected() {
        let seg = vec![qvec(&[0, 0]), qvec(&[1, 0])];
        let g = Lattice::from_basis(2, &[qvec(&[0, 1])]).unwrap();
        assert!(normalized_volume(&seg, &g).is_err());
    }

    #[test]
    fn pentagon_facets() {
        let pts = vec![
            qvec(&[0, 0]),
            qvec(&[0, 2]),
            qvec(&[1, 3]),
            qvec(&[3, 1]),
            qvec(&[2, -1]),
        ];
        let f = convex_hull_facets(&pts).unwrap();
        assert_eq!(f.len(), 5);
    }

    #[test]
    fn cube_volume_with_interior_point() {
        let mut pts = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    pts.push(qvec(&[x, y, z]));
                }
            }
        }
        pts.push(vec![rat(1, 2), rat(1, 2), rat(1, 2)]);
        assert_eq!(hull_volume(&pts).unwrap(), rat_int(1));
        assert_eq!(convex_hull_facets(&pts).unwrap().len(), 6);
    }
}
