//! Virtual cones (integer formal sums of pointed cones with a common apex)
//! and the alternating Levi cone attached to a constant face.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::inner::InnerProduct;
use crate::matrix::{add_vec, QMatrix, QVector};
use crate::polytope::{lex_cmp, transverse_within, Cone, FaceLattice};
use crate::rat::Rat;
use crate::xi::{flags, Flag, FlagMode, Xi};

/// Integer-weighted formal sum of pointed cones sharing one apex. Product
/// cones are stored flattened (ray union); the maladapted flags that
/// produced a term are kept as provenance.
#[derive(Clone, Debug)]
pub struct VirtualCone {
    /// Basis of the subspace the cones live in (lin(f)^perp for Levi cones).
    pub ambient: QMatrix,
    pub apex: QVector,
    pub terms: Vec<VirtualTerm>,
}

#[derive(Clone, Debug)]
pub struct VirtualTerm {
    pub coeff: i64,
    pub cone: Cone,
    pub provenance: Vec<Flag>,
}

impl VirtualCone {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Same formal sum with every term moved to a new apex.
    pub fn with_apex(&self, apex: &[Rat]) -> VirtualCone {
        VirtualCone {
            ambient: self.ambient.clone(),
            apex: apex.to_vec(),
            terms: self
                .terms
                .iter()
                .map(|t| VirtualTerm {
                    coeff: t.coeff,
                    cone: Cone {
                        apex: apex.to_vec(),
                        rays: t.cone.rays.clone(),
                        lineality: t.cone.lineality.clone(),
                    },
                    provenance: t.provenance.clone(),
                })
                .collect(),
        }
    }
}

/// Where the Levi cone is based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeviBase {
    /// Apex at the origin (the "shifted" cone).
    Origin,
    /// Apex at the orthogonal projection of the face onto lin(f)^perp.
    Projected,
}

/// Merges terms with identical ray sets, dropping zero coefficients; terms
/// sorted by their ray lists for canonical comparisons.
fn canonicalize(mut terms: Vec<VirtualTerm>) -> Vec<VirtualTerm> {
    terms.sort_by(|a, b| rays_cmp(&a.cone.rays, &b.cone.rays));
    let mut merged: Vec<VirtualTerm> = Vec::new();
    for t in terms {
        match merged.last_mut() {
            Some(last) if last.cone.rays == t.cone.rays => {
                last.coeff += t.coeff;
                last.provenance.extend(t.provenance);
            }
            _ => merged.push(t),
        }
    }
    merged.retain(|t| t.coeff != 0);
    merged
}

fn rays_cmp(a: &[QVector], b: &[QVector]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            match lex_cmp(x, y) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// The alternating Levi cone of a xi-constant face, via the flag expansion:
/// a signed sum over maladapted flags of flattened products of transverse
/// cones. The recursive construction is exposed separately and the two are
/// checked against each other in tests.
pub fn levi_cone(
    fl: &FaceLattice,
    face: usize,
    xi: &Xi,
    ip: &InnerProduct,
    based: LeviBase,
) -> Result<VirtualCone> {
    levi_cone_within(fl, face, fl.top(), xi, ip, based)
}

/// Levi cone of `face` relative to the sub-polytope spanned by the face
/// `within` (the whole polytope for the classical construction); used by
/// the discrete formulas that expand integrals over faces.
pub fn levi_cone_within(
    fl: &FaceLattice,
    face: usize,
    within: usize,
    xi: &Xi,
    ip: &InnerProduct,
    based: LeviBase,
) -> Result<VirtualCone> {
    if !fl.contains_face(face, within) {
        return Err(Error::Invalid(
            "face not contained in the sub-polytope".into(),
        ));
    }
    let all_flags = flags(fl, face, FlagMode::XiMaladapted, xi, ip)?;
    let mflags: Vec<Flag> = all_flags
        .into_iter()
        .filter(|fg| fg.iter().all(|&h| fl.contains_face(h, within)))
        .collect();
    let n = fl.polytope.ambient_dim();
    let mut terms = Vec::new();
    for flag in &mflags {
        let ell = flag.len() - 1;
        let mut rays: Vec<QVector> = Vec::new();
        for w in 0..flag.len() {
            let lower = flag[w];
            let upper = if w + 1 < flag.len() {
                flag[w + 1]
            } else {
                within
            };
            let t = transverse_within(fl, lower, upper, ip);
            rays.extend(t.rays);
        }
        let coeff = if ell % 2 == 0 { 1 } else { -1 };
        terms.push(VirtualTerm {
            coeff,
            cone: Cone::new(vec![Rat::zero(); n], rays, Vec::new()),
            provenance: vec![flag.clone()],
        });
    }
    // The cones live in lin(face)^perp intersected with lin(within); the
    // projected apex is f^{f-perp}, the projection onto the full complement.
    let face_lin = &fl.faces[face].lin_basis;
    let within_lin = &fl.faces[within].lin_basis;
    let perp = ip.perp_basis(face_lin);
    let ambient = intersect_spans(&perp, within_lin);
    let apex = match based {
        LeviBase::Origin => vec![Rat::zero(); n],
        LeviBase::Projected => {
            let proj = ip.projection_matrix(&perp);
            proj.mul_vec(&fl.faces[face].relint_point)
        }
    };
    let terms = canonicalize(terms);
    let vc = VirtualCone {
        ambient,
        apex: apex.clone(),
        terms,
    };
    Ok(if based == LeviBase::Projected {
        vc.with_apex(&apex)
    } else {
        vc
    })
}

/// Basis of the intersection of two column spans.
pub fn intersect_spans(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.nrows();
    if a.ncols() == 0 || b.ncols() == 0 {
        return QMatrix::zeros(n, 0);
    }
    // x in span(a) ∩ span(b): x = a u = b v; kernel of [a | -b].
    let neg_b_cols: Vec<QVector> = (0..b.ncols())
        .map(|j| b.col(j).iter().map(|x| -x).collect())
        .collect();
    let stacked = a.hstack(&QMatrix::from_columns_with_dim(n, &neg_b_cols));
    let k = stacked.kernel();
    let mut cols = Vec::new();
    for j in 0..k.ncols() {
        let u: QVector = k.col(j)[..a.ncols()].to_vec();
        cols.push(a.mul_vec(&u));
    }
    QMatrix::from_columns_with_dim(n, &cols).column_basis()
}

/// Recursive construction: [t_g^p] - sum over constant strict superfaces f
/// of [t_g^f] x LC_f^p. Must agree with `levi_cone` term by term.
pub fn levi_cone_recursive(
    fl: &FaceLattice,
    face: usize,
    xi: &Xi,
    ip: &InnerProduct,
) -> Result<VirtualCone> {
    let dec = crate::xi::xi_decomposition(fl, xi, ip);
    if !dec.constant_faces.contains(&face) {
        return Err(Error::NotXiConstant);
    }
    let mut memo: HashMap<usize, Vec<VirtualTerm>> = HashMap::new();
    let terms = levi_terms_rec(fl, face, &dec.constant_faces, ip, &mut memo);
    Ok(VirtualCone {
        ambient: ip.perp_basis(&fl.faces[face].lin_basis),
        apex: vec![Rat::zero(); fl.polytope.ambient_dim()],
        terms,
    })
}

fn levi_terms_rec(
    fl: &FaceLattice,
    g: usize,
    constant: &[usize],
    ip: &InnerProduct,
    memo: &mut HashMap<usize, Vec<VirtualTerm>>,
) -> Vec<VirtualTerm> {
    if let Some(t) = memo.get(&g) {
        return t.clone();
    }
    let n = fl.polytope.ambient_dim();
    let top = fl.top();
    let mut terms = vec![VirtualTerm {
        coeff: 1,
        cone: Cone::new(
            vec![Rat::zero(); n],
            transverse_within(fl, g, top, ip).rays,
            Vec::new(),
        ),
        provenance: vec![vec![g]],
    }];
    for &f in constant {
        if f == g || !fl.contains_face(g, f) {
            continue;
        }
        let t_gf = transverse_within(fl, g, f, ip);
        for sub in levi_terms_rec(fl, f, constant, ip, memo) {
            let mut rays = t_gf.rays.clone();
            rays.extend(sub.cone.rays.clone());
            let mut provenance = Vec::new();
            for pv in &sub.provenance {
                let mut chain = vec![g];
                chain.extend(pv.iter().copied());
                provenance.push(chain);
            }
            terms.push(VirtualTerm {
                coeff: -sub.coeff,
                cone: Cone::new(vec![Rat::zero(); n], rays, Vec::new()),
                provenance,
            });
        }
    }
    let out = canonicalize(terms);
    memo.insert(g, out.clone());
    out
}

/// Product of two cones living in orthogonal subspaces: ray union, apex sum.
pub fn cone_product(c1: &Cone, c2: &Cone, ip: &InnerProduct) -> Result<Cone> {
    let m1 = c1.span_basis();
    let m2 = c2.span_basis();
    if !ip.spans_orthogonal(&m1, &m2) {
        return Err(Error::NotOrthogonal);
    }
    let mut rays = c1.rays.clone();
    rays.extend(c2.rays.clone());
    let mut lineality = c1.lineality.clone();
    lineality.extend(c2.lineality.clone());
    Ok(Cone::new(add_vec(&c1.apex, &c2.apex), rays, lineality))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::qvec;
    use crate::polytope::{face_lattice, Polytope};
    use crate::xi::xi_decomposition;

    fn ip2() -> InnerProduct {
        InnerProduct::standard(2)
    }

    fn fig1() -> FaceLattice {
        face_lattice(
            &Polytope::from_vertices(
                &[
                    qvec(&[0, 0]),
                    qvec(&[0, 2]),
                    qvec(&[1, 3]),
                    qvec(&[3, 1]),
                    qvec(&[2, -1]),
                ],
                &ip2(),
            )
            .unwrap(),
        )
    }

    fn fig2() -> FaceLattice {
        face_lattice(
            &Polytope::from_vertices(&[qvec(&[0, 0]), qvec(&[0, 3]), qvec(&[2, 1])], &ip2())
                .unwrap(),
        )
    }

    fn face_of(fl: &FaceLattice, pts: &[QVector]) -> usize {
        fl.faces
            .iter()
            .find(|f| {
                let vs = fl.face_vertices(f.id);
                vs.len() == pts.len() && pts.iter().all(|p| vs.contains(p))
            })
            .map(|f| f.id)
            .unwrap()
    }

    #[test]
    fn maximal_face_gives_single_transverse_term() {
        let fl = fig1();
        let xi = Xi::real(qvec(&[1, 0]));
        let v = face_of(&fl, &[qvec(&[3, 1])]);
        let lc = levi_cone(&fl, v, &xi, &ip2(), LeviBase::Origin).unwrap();
        assert_eq!(lc.terms.len(), 1);
        assert_eq!(lc.terms[0].coeff, 1);
        assert_eq!(lc.terms[0].cone.rays, vec![qvec(&[-1, -2]), qvec(&[-1, 1])]);
    }

    #[test]
    fn fig1_origin_vertex_is_two_terms() {
        let fl = fig1();
        let xi = Xi::real(qvec(&[1, 0]));
        let v0 = face_of(&fl, &[qvec(&[0, 0])]);
        let lc = levi_cone(&fl, v0, &xi, &ip2(), LeviBase::Origin).unwrap();
        assert_eq!(lc.terms.len(), 2);
        let pos: Vec<_> = lc.terms.iter().filter(|t| t.coeff == 1).collect();
        let neg: Vec<_> = lc.terms.iter().filter(|t| t.coeff == -1).collect();
        assert_eq!(pos.len(), 1);
        assert_eq!(neg.len(), 1);
        assert_eq!(pos[0].cone.rays, vec![qvec(&[0, 1]), qvec(&[2, -1])]);
        assert_eq!(neg[0].cone.rays, vec![qvec(&[0, 1]), qvec(&[1, 0])]);
    }

    #[test]
    fn zero_xi_collapses() {
        let fl = fig1();
        let xi = Xi::zero(2);
        let top = fl.top();
        let lc = levi_cone(&fl, top, &xi, &ip2(), LeviBase::Origin).unwrap();
        assert_eq!(lc.terms.len(), 1);
        assert!(lc.terms[0].cone.rays.is_empty());
        assert_eq!(lc.ambient.ncols(), 0);
        // Every strict face yields the empty virtual cone.
        for f in 0..fl.faces.len() - 1 {
            let lc = levi_cone(&fl, f, &xi, &ip2(), LeviBase::Origin).unwrap();
            assert!(lc.is_empty(), "face {f} should cancel for xi = 0");
        }
    }

    #[test]
    fn recursive_matches_flag_expansion() {
        for fl in [fig1(), fig2()] {
            for xi in [
                Xi::real(qvec(&[1, 0])),
                Xi::zero(2),
                Xi::real(qvec(&[2, 3])),
            ] {
                let dec = xi_decomposition(&fl, &xi, &ip2());
                for &f in &dec.constant_faces {
                    let a = levi_cone(&fl, f, &xi, &ip2(), LeviBase::Origin).unwrap();
                    let b = levi_cone_recursive(&fl, f, &xi, &ip2()).unwrap();
                    assert_eq!(a.terms.len(), b.terms.len(), "face {f}");
                    for (x, y) in a.terms.iter().zip(&b.terms) {
                        assert_eq!(x.coeff, y.coeff);
                        assert_eq!(x.cone.rays, y.cone.rays);
                    }
                }
            }
        }
    }

    #[test]
    fn term_count_equals_flag_count_without_cancellation() {
        let fl = fig1();
        let xi = Xi::real(qvec(&[1, 0]));
        let dec = xi_decomposition(&fl, &xi, &ip2());
        for &f in &dec.constant_faces {
            let mflags = flags(&fl, f, FlagMode::XiMaladapted, &xi, &ip2()).unwrap();
            let lc = levi_cone(&fl, f, &xi, &ip2(), LeviBase::Origin).unwrap();
            assert_eq!(lc.terms.len(), mflags.len());
        }
        // Generic xi: exactly one term per vertex.
        let xi = Xi::real(qvec(&[2, 3]));
        let dec = xi_decomposition(&fl, &xi, &ip2());
        for &f in &dec.constant_faces {
            let lc = levi_cone(&fl, f, &xi, &ip2(), LeviBase::Origin).unwrap();
            assert_eq!(lc.terms.len(), 1);
        }
    }

    #[test]
    fn projected_base_apex() {
        let fl = fig1();
        let xi = Xi::real(qvec(&[1, 0]));
        let e = face_of(&fl, &[qvec(&[0, 0]), qvec(&[0, 2])]);
        let lc = levi_cone(&fl, e, &xi, &ip2(), LeviBase::Projected).unwrap();
        // The vertical edge projects onto the x-axis at the origin.
        assert_eq!(lc.apex, qvec(&[0, 0]));
        assert_eq!(lc.terms.len(), 1);
        assert_eq!(lc.terms[0].cone.rays, vec![qvec(&[1, 0])]);
    }

    #[test]
    fn non_constant_face_rejected() {
        let fl = fig1();
        let xi = Xi::real(qvec(&[1, 0]));
        assert!(matches!(
            levi_cone(&fl, fl.top(), &xi, &ip2(), LeviBase::Origin),
            Err(Error::NotXiConstant)
        ));
    }

    #[test]
    fn product_of_orthogonal_rays() {
        let ip = ip2();
        let c1 = Cone::new(qvec(&[0, 0]), vec![qvec(&[1, 0])], Vec::new());
        let c2 = Cone::new(qvec(&[0, 0]), vec![qvec(&[0, 1])], Vec::new());
        let p = cone_product(&c1, &c2, &ip).unwrap();
        assert_eq!(p.rays, vec![qvec(&[0, 1]), qvec(&[1, 0])]);
        // Product with a point cone is the identity.
        let pt = Cone::point(qvec(&[0, 0]));
        let q = cone_product(&c1, &pt, &ip).unwrap();
        assert_eq!(q.rays, c1.rays);
        // Non-orthogonal spans are rejected.
        let c3 = Cone::new(qvec(&[0, 0]), vec![qvec(&[1, 1])], Vec::new());
        assert!(matches!(
            cone_product(&c1, &c3, &ip),
            Err(Error::NotOrthogonal)
        ));
    }

    #[test]
    fn fig2_negative_levi_cones() {
        // The triangle (0,0),(0,3),(2,1): origin vertex Levi cone is the
        // difference of a cone and a larger cone sharing the ray set span.
        let fl = fig2();
        let xi = Xi::real(qvec(&[1, 0]));
        let v0 = face_of(&fl, &[qvec(&[0, 0])]);
        let lc = levi_cone(&fl, v0, &xi, &ip2(), LeviBase::Origin).unwrap();
        assert_eq!(lc.terms.len(), 2);
        let pos: Vec<_> = lc.terms.iter().filter(|t| t.coeff == 1).collect();
        let neg: Vec<_> = lc.terms.iter().filter(|t| t.coeff == -1).collect();
        assert_eq!(pos[0].cone.rays, vec![qvec(&[0, 1]), qvec(&[2, 1])]);
        assert_eq!(neg[0].cone.rays, vec![qvec(&[0, 1]), qvec(&[1, 0])]);
    }
}
