//! Triangulation of pointed cones into simplicial pieces, half-open
//! adjustment so lattice points are partitioned exactly, and enumeration of
//! lattice points in half-open parallelepipeds.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{add_vec, dot, is_zero_vec, sub_vec, QMatrix, QVector};
use crate::polytope::Cone;
use crate::rat::{rat, Rat};

/// A simplicial cone with selected facets excluded. `open_facets[j]` means
/// the facet spanned by the rays other than j is excluded, equivalently the
/// j-th barycentric coordinate is constrained to be strictly positive.
#[derive(Clone, Debug)]
pub struct HalfOpenSimplicialCone {
    pub apex: QVector,
    pub rays: Vec<QVector>,
    pub open_facets: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecomposeMode {
    /// Closed triangulation; overlaps have measure zero (for integrals).
    Integral,
    /// Half-open pieces partitioning the cone pointwise (for sums).
    Discrete,
}

/// Fan triangulation of a pointed cone from its own rays, optionally
/// half-opened so that indicator functions add up exactly to the cone.
pub fn decompose_cone(
    cone: &Cone,
    mode: DecomposeMode,
) -> Result<Vec<(i64, HalfOpenSimplicialCone)>> {
    if !cone.is_pointed() {
        return Err(Error::NotPointed);
    }
    if cone.rays.is_empty() {
        return Ok(vec![(
            1,
            HalfOpenSimplicialCone {
                apex: cone.apex.clone(),
                rays: Vec::new(),
                open_facets: Vec::new(),
            },
        )]);
    }
    let span = cone.span_basis();
    let k = span.ncols();
    // Ray coordinates inside the span.
    let rays_c: Vec<QVector> = cone
        .rays
        .iter()
        .map(|r| span.solve(r).expect("ray in span"))
        .collect();
    let simplices = placing_triangulation(&rays_c, k)?;
    let mut open_flags: Vec<Vec<bool>> = simplices.iter().map(|s| vec![false; s.len()]).collect();
    if mode == DecomposeMode::Discrete && simplices.len() > 1 {
        let w = generic_interior_point(&rays_c, &simplices, k)?;
        for (s_idx, s) in simplices.iter().enumerate() {
            let m =
                QMatrix::from_columns(&s.iter().map(|&i| rays_c[i].clone()).collect::<Vec<_>>());
            let minv = m.inverse().expect("simplicial piece");
            let bary = minv.mul_vec(&w);
            // Excluded facet j <=> w strictly on the non-piece side of the
            // hyperplane spanned by the other rays <=> j-th barycentric
            // coordinate of w is negative.
            for (j, c) in bary.iter().enumerate() {
                if c.is_negative() {
                    open_flags[s_idx][j] = true;
                }
            }
        }
    }
    Ok(simplices
        .into_iter()
        .zip(open_flags)
        .map(|(s, flags)| {
            (
                1,
                HalfOpenSimplicialCone {
                    apex: cone.apex.clone(),
                    rays: s.iter().map(|&i| cone.rays[i].clone()).collect(),
                    open_facets: flags,
                },
            )
        })
        .collect())
}

/// Placing (beneath-beyond) triangulation of the vector configuration:
/// returns simplices as index sets into `rays`, covering pos(rays) without
/// interior overlaps. Every input ray is used: rays falling inside the
/// complex built so far are inserted by stellar subdivision.
fn placing_triangulation(rays: &[QVector], k: usize) -> Result<Vec<Vec<usize>>> {
    // Start from a greedy independent subset of size k.
    let mut start: Vec<usize> = Vec::new();
    for (i, _) in rays.iter().enumerate() {
        let mut trial = start.clone();
        trial.push(i);
        let m = QMatrix::from_columns_with_dim(
            k,
            &trial.iter().map(|&j| rays[j].clone()).collect::<Vec<_>>(),
        );
        if m.rank() == trial.len() {
            start = trial;
        }
        if start.len() == k {
            break;
        }
    }
    if start.len() < k {
        return Err(Error::Invalid("cone rays do not span their space".into()));
    }
    let mut simplices: Vec<Vec<usize>> = vec![start.clone()];
    for i in 0..rays.len() {
        if start.contains(&i) {
            continue;
        }
        // Boundary facets of the current complex: facets owned by exactly
        // one simplex.
        let mut facet_owner: Vec<(Vec<usize>, usize, usize)> = Vec::new(); // (sorted facet, owner, dropped ray)
        let mut counts: std::collections::HashMap<Vec<usize>, usize> =
            std::collections::HashMap::new();
        for (s_idx, s) in simplices.iter().enumerate() {
            for drop in 0..s.len() {
                let mut f: Vec<usize> = s.iter().copied().filter(|&x| x != s[drop]).collect();
                f.sort_unstable();
                *counts.entry(f.clone()).or_insert(0) += 1;
                facet_owner.push((f, s_idx, s[drop]));
            }
        }
        let mut new_simplices = Vec::new();
        for (f, owner, dropped) in &facet_owner {
            if counts[f] != 1 {
                continue; // interior wall
            }
            // Outward normal of the boundary facet.
            let m = QMatrix::from_columns_with_dim(
                k,
                &f.iter().map(|&j| rays[j].clone()).collect::<Vec<_>>(),
            );
            let kernel = m.transpose().kernel();
            if kernel.ncols() != 1 {
                continue;
            }
            let mut normal = kernel.col(0);
            let inward = dot(&normal, &rays[*dropped]);
            if inward.is_positive() {
                normal = normal.iter().map(|x| -x).collect();
            }
            let _ = owner;
            // Visible: the new ray is strictly beyond this facet.
            if dot(&normal, &rays[i]).is_positive() {
                let mut s = f.clone();
                s.push(i);
                new_simplices.push(s);
            }
        }
        if new_simplices.is_empty() {
            // The ray lies inside the complex: stellar subdivision of every
            // simplex containing it, so the ray becomes a generator.
            let mut replaced = Vec::new();
            let mut kept = Vec::new();
            for s in &simplices {
                let m =
                    QMatrix::from_columns(&s.iter().map(|&j| rays[j].clone()).collect::<Vec<_>>());
                let bary = m.inverse().expect("simplicial piece").mul_vec(&rays[i]);
                if bary.iter().any(|c| c.is_negative()) {
                    kept.push(s.clone());
                    continue;
                }
                // Split along every positive barycentric coordinate.
                for (j, c) in bary.iter().enumerate() {
                    if c.is_positive() {
                        let mut t: Vec<usize> = s.iter().copied().filter(|&x| x != s[j]).collect();
                        t.push(i);
                        replaced.push(t);
                    }
                }
            }
            if !replaced.is_empty() {
                kept.extend(replaced);
                simplices = kept;
            }
        } else {
            simplices.extend(new_simplices);
        }
    }
    Ok(simplices)
}

/// A rational point interior to pos(rays) avoiding every facet hyperplane
/// of every piece; deterministic retry over perturbation weights.
fn generic_interior_point(rays: &[QVector], simplices: &[Vec<usize>], k: usize) -> Result<QVector> {
    'attempt: for a in 0..64i64 {
        let mut w = vec![Rat::zero(); k];
        for (i, r) in rays.iter().enumerate() {
            let coeff = Rat::from_integer(1.into()) + rat(i as i64 + 1, 7 + 3 * a);
            w = add_vec(&w, &r.iter().map(|x| x * &coeff).collect::<QVector>());
        }
        for s in simplices {
            let m = QMatrix::from_columns(&s.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>());
            let bary = m.inverse().expect("simplicial").mul_vec(&w);
            if bary.iter().any(|c| c.is_zero()) {
                continue 'attempt;
            }
        }
        return Ok(w);
    }
    Err(Error::ExhaustedRetries(64))
}

/// Scales each ray to the primitive vector of the lattice along that ray
/// (requires the ray direction to be rational with respect to L).
pub fn lattice_primitive_rays(cone: &Cone, l: &Lattice) -> Result<Vec<QVector>> {
    cone.rays
        .iter()
        .map(|r| {
            let c = l.span_coords(r).ok_or(Error::NotRational)?;
            Ok(l.basis().mul_vec(&crate::matrix::primitive_integer(&c)))
        })
        .collect()
}

/// Exact enumeration of (apex + half-open box of the rays) ∩ (shift + L).
/// Rays must be L-primitive and independent, spanning the span of L.
/// Coefficient windows are [0,1) by default and (0,1] for open facets.
pub fn parallelepiped_points(
    rays: &[QVector],
    l: &Lattice,
    apex: &[Rat],
    shift: &[Rat],
    open_facets: &[bool],
) -> Result<Vec<QVector>> {
    let r = l.rank();
    if rays.len() != r {
        return Err(Error::DimensionMismatch(
            "parallelepiped needs rank-many rays".into(),
        ));
    }
    if r == 0 {
        // Zero-dimensional: the box is {apex}; the candidate point is shift.
        return Ok(if sub_vec(apex, shift).iter().all(|x| x.is_zero()) {
            vec![apex.to_vec()]
        } else {
            Vec::new()
        });
    }
    // Work in L-coordinates: lattice points are shift_c + Z^r.
    let apex_c = l.span_coords(apex).ok_or(Error::NotRational)?;
    let shift_c = l.span_coords(shift).ok_or(Error::NotRational)?;
    let ray_m = QMatrix::from_columns(
        &rays
            .iter()
            .map(|v| l.span_coords(v).ok_or(Error::NotRational))
            .collect::<Result<Vec<_>>>()?,
    );
    let ray_inv = ray_m
        .inverse()
        .map_err(|_| Error::Invalid("parallelepiped rays are dependent".into()))?;
    // Bounding box of the parallelepiped corners in x-space, where points
    // are x = shift_c + z, z integer, and a = ray_inv (x - apex_c) in the
    // half-open window.
    let mut lo = apex_c.clone();
    let mut hi = apex_c.clone();
    for mask in 0..(1u32 << r) {
        let mut corner = apex_c.clone();
        for j in 0..r {
            if mask & (1 << j) != 0 {
                corner = add_vec(&corner, &ray_m.col(j));
            }
        }
        for j in 0..r {
            if corner[j] < lo[j] {
                lo[j] = corner[j].clone();
            }
            if corner[j] > hi[j] {
                hi[j] = corner[j].clone();
            }
        }
    }
    // Integer ranges for z = x - shift_c.
    let lo_z: Vec<BigInt> = (0..r)
        .map(|j| (&lo[j] - &shift_c[j]).ceil().to_integer())
        .collect();
    let hi_z: Vec<BigInt> = (0..r)
        .map(|j| (&hi[j] - &shift_c[j]).floor().to_integer())
        .collect();
    if (0..r).any(|j| hi_z[j] < lo_z[j]) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut z: Vec<BigInt> = lo_z.clone();
    'enumerate: loop {
        let x: QVector = (0..r)
            .map(|j| &shift_c[j] + Rat::from_integer(z[j].clone()))
            .collect();
        let a = ray_inv.mul_vec(&sub_vec(&x, &apex_c));
        let inside = a.iter().zip(open_facets).all(|(c, &open)| {
            if open {
                c > &Rat::zero() && c <= &Rat::from_integer(1.into())
            } else {
                c >= &Rat::zero() && c < &Rat::from_integer(1.into())
            }
        });
        if inside {
            out.push(l.basis().mul_vec(&x));
        }
        // Advance the counter.
        for j in 0..r {
            z[j] += 1;
            if z[j] <= hi_z[j] {
                continue 'enumerate;
            }
            z[j] = lo_z[j].clone();
        }
        break;
    }
    out.sort_by(crate::polytope::lex_cmp);
    Ok(out)
}

/// Number of lattice points the closed-mode box must contain: |det| of the
/// rays in lattice coordinates.
pub fn box_point_count(rays: &[QVector], l: &Lattice) -> Result<BigInt> {
    let ray_m = QMatrix::from_columns(
        &rays
            .iter()
            .map(|v| l.span_coords(v).ok_or(Error::NotRational))
            .collect::<Result<Vec<_>>>()?,
    );
    let d = ray_m.det();
    Ok(d.numer().abs() / d.denom().abs())
}

/// Membership predicate of a half-open simplicial cone; exact.
pub fn half_open_contains(piece: &HalfOpenSimplicialCone, x: &[Rat]) -> bool {
    let d = sub_vec(x, &piece.apex);
    if piece.rays.is_empty() {
        return is_zero_vec(&d);
    }
    let m = QMatrix::from_columns(&piece.rays.clone());
    let Some(a) = m.solve(&d) else { return false };
    // Residual must vanish: solution only valid inside the span.
    let back = m.mul_vec(&a);
    if !is_zero_vec(&sub_vec(&back, &d)) {
        return false;
    }
    a.iter().zip(&piece.open_facets).all(|(c, &open)| {
        if open {
            c.is_positive()
        } else {
            !c.is_negative()
        }
    })
}
