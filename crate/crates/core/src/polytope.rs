//! Polytopes with dual V/H representations, face lattices, and the tangent,
//! transverse, and normal cone constructions.
//!
//! Functional-like data (facet normals, later the exponent functionals)
//! pair with points through the ambient inner product; see `inner`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hull::{affine_hull, convex_hull_facets, to_affine_coords};

use crate::inner::InnerProduct;
use crate::matrix::{
    add_vec, is_zero_vec, primitive_integer, scale_vec, sub_vec, QMatrix, QVector,
};
use crate::rat::Rat;

/// One halfspace <a, x> <= b, pairing via the inner product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: QVector,
    pub offset: Rat,
}

/// A pointed-or-not polyhedral cone: apex + rays (+ lineality columns).
/// Rays are primitive integer vectors, lexicographically sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub apex: QVector,
    pub rays: Vec<QVector>,
    pub lineality: Vec<QVector>,
}

impl Cone {
    pub fn new(apex: QVector, rays: Vec<QVector>, lineality: Vec<QVector>) -> Self {
        let mut canon: Vec<QVector> = rays
            .into_iter()
            .filter(|r| !is_zero_vec(r))
            .map(|r| primitive_integer(&r))
            .collect();
        canon.sort_by(crate::polytope::lex_cmp);
        canon.dedup();
        Cone {
            apex,
            rays: canon,
            lineality,
        }
    }

    pub fn point(apex: QVector) -> Self {
        Cone {
            apex,
            rays: Vec::new(),
            lineality: Vec::new(),
        }
    }

    /// Pointed: no lineality generators and no nontrivial positive
    /// combination of rays vanishing (0 outside the convex hull of the
    /// primitive rays).
    pub fn is_pointed(&self) -> bool {
        if !self.lineality.is_empty() {
            return false;
        }
        if self.rays.len() < 2 {
            return true;
        }
        let origin = vec![Rat::zero(); self.ambient_dim()];
        // 0 in aff(rays)?
        let base = &self.rays[0];
        let diffs: Vec<QVector> = self.rays[1..].iter().map(|r| sub_vec(r, base)).collect();
        let m = QMatrix::from_columns_with_dim(self.ambient_dim(), &diffs);
        if !m.column_span_contains(&sub_vec(&origin, base)) {
            return true;
        }
        // 0 in conv(rays)? Work in affine-hull coordinates.
        let (b, basis) = affine_hull(&self.rays);
        if basis.ncols() == 0 {
            return !is_zero_vec(&self.rays[0]);
        }
        let mut pts = self.rays.clone();
        pts.push(origin.clone());
        let coords = to_affine_coords(&pts, &b, &basis);
        let zero_c = coords.last().unwrap().clone();
        let ray_c = &coords[..coords.len() - 1];
        match convex_hull_facets(ray_c) {
            Ok(facets) => facets
                .iter()
                .any(|f| crate::matrix::dot(&f.normal, &zero_c) > f.offset),
            Err(_) => {
                // Rays not full-dimensional in their affine hull cannot
                // happen: diffs span the hull by construction.
                false
            }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.apex.len()
    }

    /// Basis of the linear span of rays and lineality.
    pub fn span_basis(&self) -> QMatrix {
        let mut cols = self.rays.clone();
        cols.extend(self.lineality.iter().cloned());
        QMatrix::from_columns_with_dim(self.ambient_dim(), &cols).column_basis()
    }

    pub fn dim(&self) -> usize {
        self.span_basis().ncols()
    }

    pub fn at_origin(&self) -> Cone {
        Cone {
            apex: vec![Rat::zero(); self.apex.len()],
            rays: self.rays.clone(),
            lineality: self.lineality.clone(),
        }
    }

    pub fn translated(&self, shift: &[Rat]) -> Cone {
        Cone {
            apex: add_vec(&self.apex, shift),
            rays: self.rays.clone(),
            lineality: self.lineality.clone(),
        }
    }
}

pub(crate) fn lex_cmp(a: &QVector, b: &QVector) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// A bounded rational polytope, possibly lower-dimensional in its ambient
/// space. Both representations are materialized on construction.
#[derive(Clone, Debug)]
pub struct Polytope {
    ambient_dim: usize,
    vertices: Vec<QVector>,
    base: QVector,
    lin: QMatrix,
    /// Facets within the affine hull; normals are functional representatives.
    facets: Vec<FacetData>,
    ip: InnerProduct,
}

#[derive(Clone, Debug)]
pub struct FacetData {
    pub halfspace: Halfspace,
    pub vertex_ids: Vec<usize>,
}

impl Polytope {
    /// Builds from a vertex set; non-extreme points are dropped.
    pub fn from_vertices(points: &[QVector], ip: &InnerProduct) -> Result<Polytope> {
        if points.is_empty() {
            return Err(Error::Empty);
        }
        let ambient_dim = points[0].len();
        if ambient_dim != ip.dim() {
            return Err(Error::DimensionMismatch("inner product dimension".into()));
        }
        let mut pts: Vec<QVector> = points.to_vec();
        pts.sort_by(lex_cmp);
        pts.dedup();
        let (base, lin) = affine_hull(&pts);
        let k = lin.ncols();
        if k == 0 {
            return Ok(Polytope {
                ambient_dim,
                vertices: pts,
                base,
                lin,
                facets: Vec::new(),
                ip: ip.clone(),
            });
        }
        let coords = to_affine_coords(&pts, &base, &lin);
        let raw_facets = convex_hull_facets(&coords)?;
        // Extreme points: incident facet normals span the full coord space.
        let mut extreme = Vec::new();
        for (i, _) in pts.iter().enumerate() {
            let normals: Vec<QVector> = raw_facets
                .iter()
                .filter(|f| f.incident.contains(&i))
                .map(|f| f.normal.clone())
                .collect();
            let rank = QMatrix::from_columns_with_dim(k, &normals).rank();
            if rank == k {
                extreme.push(pts[i].clone());
            }
        }
        if extreme.len() != pts.len() {
            return Self::from_vertices(&extreme, ip);
        }
        // Convert coord-space facets to ambient halfspaces. With
        // c(x) = S (x - base) for the exact left inverse S of the hull
        // basis, the form n^T c(x) <= b becomes (S^T n)^T x <= b + (S^T n)^T base.
        let st = lin
            .transpose()
            .mul(&lin)
            .inverse()
            .expect("hull basis is independent")
            .mul(&lin.transpose());
        let gram_inv = ip.gram().inverse().expect("gram invertible");
        let mut facets = Vec::new();
        for f in &raw_facets {
            let form = st.transpose().mul_vec(&f.normal);
            let rep = gram_inv.mul_vec(&form);
            let rep = primitive_integer(&rep);
            let offset = ip.pair(&rep, &pts[f.incident[0]]);
            let mut ids = f.incident.clone();
            ids.sort_unstable();
            facets.push(FacetData {
                halfspace: Halfspace {
                    normal: rep,
                    offset,
                },
                vertex_ids: ids,
            });
        }
        facets.sort_by(|a, b| {
            lex_cmp(&a.halfspace.normal, &b.halfspace.normal)
                .then_with(|| a.halfspace.offset.cmp(&b.halfspace.offset))
        });
        Ok(Polytope {
            ambient_dim,
            vertices: pts,
            base,
            lin,
            facets,
            ip: ip.clone(),
        })
    }

    /// Builds from inequalities <a_j, x> <= b_j. The feasible set must be
    /// bounded and nonempty.
    pub fn from_hrep(
        ambient_dim: usize,
        ineqs: &[Halfspace],
        ip: &InnerProduct,
    ) -> Result<Polytope> {
        let n = ambient_dim;
        // Standard-dot forms for feasibility arithmetic.
        let forms: Vec<QVector> = ineqs.iter().map(|h| ip.gram().mul_vec(&h.normal)).collect();
        let offs: Vec<Rat> = ineqs.iter().map(|h| h.offset.clone()).collect();
        if !recession_trivial(n, &forms) {
            return Err(Error::Unbounded);
        }
        let m = ineqs.len();
        let mut verts: Vec<QVector> = Vec::new();
        let mut subset: Vec<usize> = (0..n.min(m)).collect();
        if m >= n && n > 0 {
            loop {
                let a = QMatrix::from_rows(subset.iter().map(|&j| forms[j].clone()).collect());
                let b: QVector = subset.iter().map(|&j| offs[j].clone()).collect();
                if a.rank() == n {
                    if let Some(x) = a.solve(&b) {
                        let feasible = (0..m).all(|j| crate::matrix::dot(&forms[j], &x) <= offs[j]);
                        if feasible && !verts.contains(&x) {
                            verts.push(x);
                        }
                    }
                }
                let mut i = n;
                let mut advanced = false;
                while i > 0 {
                    i -= 1;
                    if subset[i] != i + m - n {
                        subset[i] += 1;
                        for j in i + 1..n {
                            subset[j] = subset[j - 1] + 1;
                        }
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    break;
                }
            }
        }
        if verts.is_empty() {
            return Err(Error::Empty);
        }
        Self::from_vertices(&verts, ip)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.lin.ncols()
    }

    pub fn vertices(&self) -> &[QVector] {
        &self.vertices
    }

    pub fn inner_product(&self) -> &InnerProduct {
        &self.ip
    }

    /// Basis of the linear subspace parallel to the affine hull.
    pub fn lin_basis(&self) -> &QMatrix {
        &self.lin
    }

    pub fn facet_data(&self) -> &[FacetData] {
        &self.facets
    }

    /// Irredundant inequality representation. For lower-dimensional
    /// polytopes the affine hull contributes equality pairs.
    pub fn hrep(&self) -> Vec<Halfspace> {
        let mut out: Vec<Halfspace> = self.facets.iter().map(|f| f.halfspace.clone()).collect();
        // Affine hull equalities as inequality pairs.
        let perp = self.ip.perp_basis(&self.lin);
        for j in 0..perp.ncols() {
            let a = primitive_integer(&perp.col(j));
            let b = self.ip.pair(&a, &self.base);
            out.push(Halfspace {
                normal: a.clone(),
                offset: b.clone(),
            });
            out.push(Halfspace {
                normal: scale_vec(&-Rat::one(), &a),
                offset: -b,
            });
        }
        out
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        if self.lin.ncols() < self.ambient_dim {
            // Must lie in the affine hull.
            let d = sub_vec(x, &self.base);
            if !self.lin.column_span_contains(&d) {
                return false;
            }
        }
        self.facets
            .iter()
            .all(|f| self.ip.pair(&f.halfspace.normal, x) <= f.halfspace.offset)
    }

    pub fn barycenter(&self) -> QVector {
        let mut c = vec![Rat::zero(); self.ambient_dim];
        for v in &self.vertices {
            c = add_vec(&c, v);
        }
        scale_vec(&Rat::new(1.into(), (self.vertices.len() as i64).into()), &c)
    }

    /// Dilation by t > 0 composed with translation; the normal fan is
    /// unchanged (checked) and vertex ids correspond (the map preserves
    /// lexicographic order).
    pub fn dilate_translate(&self, t: &Rat, shift: &[Rat]) -> Result<Polytope> {
        if !t.is_positive() {
            return Err(Error::Invalid("dilation factor must be positive".into()));
        }
        let pts: Vec<QVector> = self
            .vertices
            .iter()
            .map(|v| add_vec(&scale_vec(t, v), shift))
            .collect();
        let q = Self::from_vertices(&pts, &self.ip)?;
        let normals = |p: &Polytope| -> Vec<QVector> {
            p.facets
                .iter()
                .map(|f| f.halfspace.normal.clone())
                .collect()
        };
        if normals(self) != normals(&q) {
            return Err(Error::Invalid("dilation changed the normal fan".into()));
        }
        Ok(q)
    }
}

/// True if {x : <form_j, x> <= 0 for all j} = {0} (standard-dot forms),
/// i.e. pos{form_j} is all of the dual space, i.e. 0 lies in the interior
/// of conv{form_j}.
fn recession_trivial(n: usize, forms: &[QVector]) -> bool {
    if n == 0 {
        return true;
    }
    let m = QMatrix::from_columns_with_dim(n, forms);
    if m.rank() != n {
        return false;
    }
    let Ok(facets) = convex_hull_facets(forms) else {
        return false;
    };
    facets.iter().all(|f| f.offset.is_positive())
}

/// One face of a polytope.
#[derive(Clone, Debug)]
pub struct Face {
    pub id: usize,
    pub vertex_ids: Vec<usize>,
    pub active_facets: Vec<usize>,
    pub dim: usize,
    pub lin_basis: QMatrix,
    pub relint_point: QVector,
}

/// The full face poset of a polytope, ordered by dimension then vertex set.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    pub polytope: Polytope,
    pub faces: Vec<Face>,
    /// covers[i] = faces covering face i (dimension exactly one higher).
    pub covers: Vec<Vec<usize>>,
}

impl FaceLattice {
    pub fn top(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn contains_face(&self, small: usize, big: usize) -> bool {
        let s = &self.faces[small].vertex_ids;
        let b = &self.faces[big].vertex_ids;
        s.iter().all(|v| b.contains(v))
    }

    pub fn face_vertices(&self, id: usize) -> Vec<QVector> {
        self.faces[id]
            .vertex_ids
            .iter()
            .map(|&v| self.polytope.vertices()[v].clone())
            .collect()
    }

    /// Faces of dimension d, by id.
    pub fn faces_of_dim(&self, d: usize) -> Vec<usize> {
        self.faces
            .iter()
            .filter(|f| f.dim == d)
            .map(|f| f.id)
            .collect()
    }

    /// All faces strictly containing `id`.
    pub fn strict_superfaces(&self, id: usize) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&j| j != id && self.contains_face(id, j))
            .collect()
    }
}

/// Enumerates every face of the polytope, materializing the poset.
pub fn face_lattice(p: &Polytope) -> FaceLattice {
    let nv = p.vertices().len();
    let all: Vec<usize> = (0..nv).collect();
    let mut sets: Vec<Vec<usize>> = vec![all];
    if p.dim() > 0 {
        // Closure of facet incidences under intersection.
        let mut frontier: Vec<Vec<usize>> = p.facets.iter().map(|f| f.vertex_ids.clone()).collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in &frontier {
                if !sets.contains(s) {
                    sets.push(s.clone());
                    for f in &p.facets {
                        let inter: Vec<usize> = s
                            .iter()
                            .copied()
                            .filter(|v| f.vertex_ids.contains(v))
                            .collect();
                        if !inter.is_empty() && &inter != s {
                            next.push(inter);
                        }
                    }
                }
            }
            frontier = next;
        }
    }
    let mut faces: Vec<Face> = sets
        .into_iter()
        .map(|vertex_ids| {
            let pts: Vec<QVector> = vertex_ids
                .iter()
                .map(|&v| p.vertices()[v].clone())
                .collect();
            let (_, lin) = affine_hull(&pts);
            let dim = lin.ncols();
            let relint = {
                let mut c = vec![Rat::zero(); p.ambient_dim()];
                for q in &pts {
                    c = add_vec(&c, q);
                }
                scale_vec(&Rat::new(1.into(), (pts.len() as i64).into()), &c)
            };
            let active: Vec<usize> = p
                .facets
                .iter()
                .enumerate()
                .filter(|(_, f)| vertex_ids.iter().all(|v| f.vertex_ids.contains(v)))
                .map(|(i, _)| i)
                .collect();
            Face {
                id: 0,
                vertex_ids,
                active_facets: active,
                dim,
                lin_basis: lin,
                relint_point: relint,
            }
        })
        .collect();
    faces.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then_with(|| a.vertex_ids.cmp(&b.vertex_ids))
    });
    for (i, f) in faces.iter_mut().enumerate() {
        f.id = i;
    }
    // Euler characteristic: sum over all nonempty faces of (-1)^dim is 1.
    let euler: i64 = faces
        .iter()
        .map(|f| if f.dim % 2 == 0 { 1 } else { -1 })
        .sum();
    assert_eq!(euler, 1, "face lattice fails the Euler check");
    let covers: Vec<Vec<usize>> = (0..faces.len())
        .map(|i| {
            (0..faces.len())
                .filter(|&j| {
                    faces[j].dim == faces[i].dim + 1
                        && faces[i]
                            .vertex_ids
                            .iter()
                            .all(|v| faces[j].vertex_ids.contains(v))
                })
                .collect()
        })
        .collect();
    FaceLattice {
        polytope: p.clone(),
        faces,
        covers,
    }
}

/// Tangent, transverse, and normal cones at a face.
pub fn cones_at_face(fl: &FaceLattice, face_id: usize, ip: &InnerProduct) -> (Cone, Cone, Cone) {
    let p = &fl.polytope;
    let f = &fl.faces[face_id];
    let covering = &fl.covers[face_id];
    let dirs: Vec<QVector> = covering
        .iter()
        .map(|&g| sub_vec(&fl.faces[g].relint_point, &f.relint_point))
        .collect();
    let tangent = Cone::new(f.relint_point.clone(), dirs.clone(), f.lin_basis.columns());
    let proj = {
        let perp = ip.perp_basis(&f.lin_basis);
        ip.projection_matrix(&perp)
    };
    let transverse = Cone::new(
        proj.mul_vec(&f.relint_point),
        dirs.iter().map(|d| proj.mul_vec(d)).collect(),
        Vec::new(),
    );
    let normal_rays: Vec<QVector> = f
        .active_facets
        .iter()
        .map(|&j| p.facets[j].halfspace.normal.clone())
        .collect();
    let normal = Cone::new(
        vec![Rat::zero(); p.ambient_dim()],
        normal_rays,
        ip.perp_basis(p.lin_basis()).columns(),
    );
    (tangent, transverse, normal)
}

/// Transverse cone of the face `f_small` inside the polytope spanned by
/// face `f_big` (both faces of the same lattice, f_small ⊆ f_big).
pub fn transverse_within(
    fl: &FaceLattice,
    f_small: usize,
    f_big: usize,
    ip: &InnerProduct,
) -> Cone {
    assert!(fl.contains_face(f_small, f_big), "faces not nested");
    let fs = &fl.faces[f_small];
    let perp = ip.perp_basis(&fs.lin_basis);
    let proj = ip.projection_matrix(&perp);
    // Rays: directions into faces covering f_small inside f_big.
    let dirs: Vec<QVector> = fl.covers[f_small]
        .iter()
        .filter(|&&g| fl.contains_face(g, f_big))
        .map(|&g| sub_vec(&fl.faces[g].relint_point, &fs.relint_point))
        .collect();
    Cone::new(
        proj.mul_vec(&fs.relint_point),
        dirs.iter().map(|d| proj.mul_vec(d)).collect(),
        Vec::new(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::qvec;
    use crate::rat::{rat, rat_int};

    fn ip2() -> InnerProduct {
        InnerProduct::standard(2)
    }

    fn unit_square() -> Polytope {
        Polytope::from_vertices(
            &[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])],
            &ip2(),
        )
        .unwrap()
    }

    fn fig1_pentagon() -> Polytope {
        Polytope::from_vertices(
            &[
                qvec(&[0, 0]),
                qvec(&[0, 2]),
                qvec(&[1, 3]),
                qvec(&[3, 1]),
                qvec(&[2, -1]),
            ],
            &ip2(),
        )
        .unwrap()
    }

    #[test]
    fn square_roundtrip() {
        let p = unit_square();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets.len(), 4);
        let h = p.hrep();
        let q = Polytope::from_hrep(2, &h, &ip2()).unwrap();
        assert_eq!(q.vertices(), p.vertices());
        let h2 = q.hrep();
        assert_eq!(h.len(), h2.len());
    }

    #[test]
    fn pentagon_has_five_facets() {
        let p = fig1_pentagon();
        assert_eq!(p.facets.len(), 5);
        let q = Polytope::from_hrep(2, &p.hrep(), &ip2()).unwrap();
        assert_eq!(q.vertices().len(), 5);
    }

    #[test]
    fn single_point_polytope() {
        let p = Polytope::from_vertices(&[vec![rat(1, 2), rat(1, 2)]], &ip2()).unwrap();
        assert_eq!(p.dim(), 0);
        assert!(p.contains(&[rat(1, 2), rat(1, 2)]));
        assert!(!p.contains(&qvec(&[0, 0])));
        // hrep of a point carries two equality pairs.
        let q = Polytope::from_hrep(2, &p.hrep(), &ip2()).unwrap();
        assert_eq!(q.vertices(), p.vertices());
    }

    #[test]
    fn unbounded_hrep_rejected() {
        let h = vec![
            Halfspace {
                normal: qvec(&[1, 0]),
                offset: rat_int(1),
            },
            Halfspace {
                normal: qvec(&[0, 1]),
                offset: rat_int(1),
            },
        ];
        assert!(matches!(
            Polytope::from_hrep(2, &h, &ip2()),
            Err(Error::Unbounded)
        ));
    }

    #[test]
    fn empty_hrep_rejected() {
        let h = vec![
            Halfspace {
                normal: qvec(&[1, 0]),
                offset: rat_int(-1),
            },
            Halfspace {
                normal: qvec(&[-1, 0]),
                offset: rat_int(0),
            },
            Halfspace {
                normal: qvec(&[0, 1]),
                offset: rat_int(1),
            },
            Halfspace {
                normal: qvec(&[0, -1]),
                offset: rat_int(1),
            },
        ];
        assert!(matches!(
            Polytope::from_hrep(2, &h, &ip2()),
            Err(Error::Empty)
        ));
    }

    #[test]
    fn interior_points_dropped() {
        let p = Polytope::from_vertices(
            &[
                qvec(&[0, 0]),
                qvec(&[2, 0]),
                qvec(&[0, 2]),
                qvec(&[2, 2]),
                qvec(&[1, 1]),
                qvec(&[1, 0]),
            ],
            &ip2(),
        )
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn square_face_lattice() {
        let fl = face_lattice(&unit_square());
        assert_eq!(fl.faces.len(), 9);
        assert_eq!(fl.faces_of_dim(0).len(), 4);
        assert_eq!(fl.faces_of_dim(1).len(), 4);
        assert_eq!(fl.faces_of_dim(2).len(), 1);
    }

    #[test]
    fn triangle_and_pentagon_lattices() {
        let t = Polytope::from_vertices(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])], &ip2())
            .unwrap();
        assert_eq!(face_lattice(&t).faces.len(), 7);
        assert_eq!(face_lattice(&fig1_pentagon()).faces.len(), 11);
    }

    #[test]
    fn face_normal_dim_sum() {
        let fl = face_lattice(&fig1_pentagon());
        for f in &fl.faces {
            let (_, _, normal) = cones_at_face(&fl, f.id, &ip2());
            assert_eq!(f.dim + normal.dim(), 2, "face {:?}", f.vertex_ids);
        }
    }

    #[test]
    fn transverse_apex_is_face_projection() {
        // The apex equals the orthogonal projection of any point of the
        // face's affine hull onto lin(f)^perp; all vertices of the face
        // project to it.
        let ip = ip2();
        let fl = face_lattice(&fig1_pentagon());
        for f in &fl.faces {
            let (_, transverse, _) = cones_at_face(&fl, f.id, &ip);
            let perp = ip.perp_basis(&f.lin_basis);
            let proj = ip.projection_matrix(&perp);
            for v in fl.face_vertices(f.id) {
                assert_eq!(proj.mul_vec(&v), transverse.apex, "face {:?}", f.vertex_ids);
            }
        }
    }

    #[test]
    fn square_vertex_cones() {
        let fl = face_lattice(&unit_square());
        let v0 = fl
            .faces
            .iter()
            .find(|f| f.dim == 0 && fl.face_vertices(f.id)[0] == qvec(&[0, 0]))
            .unwrap()
            .id;
        let (tangent, transverse, _) = cones_at_face(&fl, v0, &ip2());
        assert_eq!(transverse.rays, vec![qvec(&[0, 1]), qvec(&[1, 0])]);
        // Vertex: tangent cone equals transverse cone after apex shift.
        assert_eq!(tangent.rays, transverse.rays);
        assert_eq!(transverse.apex, qvec(&[0, 0]));
    }

    #[test]
    fn pentagon_edge_transverse_ray() {
        // Edge e from (0,0) to (0,2): transverse cone = ray through (1,0).
        let fl = face_lattice(&fig1_pentagon());
        let e = fl
            .faces
            .iter()
            .find(|f| {
                f.dim == 1 && {
                    let vs = fl.face_vertices(f.id);
                    vs.contains(&qvec(&[0, 0])) && vs.contains(&qvec(&[0, 2]))
                }
            })
            .unwrap()
            .id;
        let (_, transverse, _) = cones_at_face(&fl, e, &ip2());
        assert_eq!(transverse.rays, vec![qvec(&[1, 0])]);
        assert!(transverse.apex.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn whole_polytope_transverse_is_a_point() {
        let fl = face_lattice(&unit_square());
        let top = fl.top();
        let (_, transverse, _) = cones_at_face(&fl, top, &ip2());
        assert!(transverse.rays.is_empty());
        assert_eq!(transverse.dim(), 0);
    }

    #[test]
    fn dilate_and_translate() {
        let p = fig1_pentagon();
        let q = p.dilate_translate(&rat_int(3), &qvec(&[0, 0])).unwrap();
        assert!(q.vertices().contains(&qvec(&[3, 9])));
        let r = p.dilate_translate(&rat_int(1), &qvec(&[1, 1])).unwrap();
        assert!(r.vertices().contains(&qvec(&[1, 1])));
        // Same normal fan: identical primitive facet normals.
        let n1: Vec<_> = p
            .facets
            .iter()
            .map(|f| f.halfspace.normal.clone())
            .collect();
        let n2: Vec<_> = r
            .facets
            .iter()
            .map(|f| f.halfspace.normal.clone())
            .collect();
        assert_eq!(n1, n2);
    }

    #[test]
    fn lower_dimensional_segment() {
        let p = Polytope::from_vertices(&[qvec(&[0, 0]), qvec(&[2, 0])], &ip2()).unwrap();
        assert_eq!(p.dim(), 1);
        let fl = face_lattice(&p);
        assert_eq!(fl.faces.len(), 3);
        assert!(p.contains(&qvec(&[1, 0])));
        assert!(!p.contains(&qvec(&[1, 1])));
        let q = Polytope::from_hrep(2, &p.hrep(), &ip2()).unwrap();
        assert_eq!(q.vertices(), p.vertices());
    }

    #[test]
    fn three_dim_cube_lattice() {
        let mut vs = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    vs.push(qvec(&[x, y, z]));
                }
            }
        }
        let p = Polytope::from_vertices(&vs, &InnerProduct::standard(3)).unwrap();
        let fl = face_lattice(&p);
        assert_eq!(fl.faces.len(), 8 + 12 + 6 + 1);
    }
}
