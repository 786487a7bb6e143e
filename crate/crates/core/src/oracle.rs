//! Independent brute-force references: lattice enumeration and summation,
//! Gauss-Legendre quadrature for exponential integrals, Ehrhart tables.
//! Nothing here touches the Brion machinery, so engine results can be
//! checked against these without circularity.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::inner::InnerProduct;
use crate::lattice::Lattice;
use crate::matrix::{sub_vec, QMatrix, QVector};
use crate::numeric::Complex;
use crate::polytope::Polytope;
use crate::rat::Rat;
use crate::xi::Xi;

/// All points of (shift + L) inside the polytope, by bounding box in
/// lattice coordinates plus exact membership. The lattice may have lower
/// rank than the ambient space: candidates live on shift + span(L) and the
/// membership test filters the rest.
pub fn lattice_points(p: &Polytope, l: &Lattice, shift: &[Rat]) -> Result<Vec<QVector>> {
    if l.rank() == 0 {
        return Ok(if p.contains(shift) {
            vec![shift.to_vec()]
        } else {
            Vec::new()
        });
    }
    // Exact left inverse (B^T B)^{-1} B^T: on points of shift + span(L) it
    // recovers coordinates; on others it merely bounds them, which is all
    // the bounding box needs (convexity).
    let b = l.basis();
    let inv = b
        .transpose()
        .mul(b)
        .inverse()
        .map_err(|_| Error::Invalid("lattice basis must be independent".into()))?
        .mul(&b.transpose());
    let shift_c = inv.mul_vec(shift);
    let mut lo: Option<QVector> = None;
    let mut hi: Option<QVector> = None;
    for v in p.vertices() {
        let c = inv.mul_vec(v);
        match (&mut lo, &mut hi) {
            (Some(lo), Some(hi)) => {
                for j in 0..c.len() {
                    if c[j] < lo[j] {
                        lo[j] = c[j].clone();
                    }
                    if c[j] > hi[j] {
                        hi[j] = c[j].clone();
                    }
                }
            }
            _ => {
                lo = Some(c.clone());
                hi = Some(c);
            }
        }
    }
    let (lo, hi) = (lo.ok_or(Error::Empty)?, hi.ok_or(Error::Empty)?);
    let r = l.rank();
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
    let mut z = lo_z.clone();
    'walk: loop {
        let coords: QVector = (0..r)
            .map(|j| &shift_c[j] + Rat::from_integer(z[j].clone()))
            .collect();
        let pt = l.basis().mul_vec(&coords);
        if p.contains(&pt) {
            out.push(pt);
        }
        for j in 0..r {
            z[j] += 1;
            if z[j] <= hi_z[j] {
                continue 'walk;
            }
            z[j] = lo_z[j].clone();
        }
        break;
    }
    out.sort_by(crate::polytope::lex_cmp);
    Ok(out)
}

/// Exact enumeration plus high-precision exponential sum.
pub fn lattice_enum_sum(
    p: &Polytope,
    l: &Lattice,
    shift: &[Rat],
    xi: &Xi,
    ip: &InnerProduct,
    prec: u32,
) -> Result<(Vec<QVector>, Complex)> {
    let pts = lattice_points(p, l, shift)?;
    let mut sum = Complex::zero(prec);
    for pt in &pts {
        let (re, im) = xi.pair(ip, pt);
        sum = sum.add(&crate::numeric::exp_pair(prec, &re, &im));
    }
    Ok((pts, sum))
}

/// Counts |t p ∩ L| for t = 1..=t_max by enumeration.
pub fn ehrhart_table(p: &Polytope, l: &Lattice, t_max: u32) -> Result<Vec<BigInt>> {
    let mut out = Vec::new();
    let zero_shift = vec![Rat::zero(); p.ambient_dim()];
    for t in 1..=t_max {
        let tp = p.dilate_translate(&Rat::from_integer(t.into()), &zero_shift)?;
        let pts = lattice_points(&tp, l, &zero_shift)?;
        out.push(BigInt::from(pts.len() as u64));
    }
    Ok(out)
}

/// Gauss-Legendre nodes and weights on [0, 1], by Newton iteration on
/// Legendre polynomials in f64.
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Initial guess (Chebyshev-like) on [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Evaluate P_n and P_n' by recurrence.
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push(0.5 * (x + 1.0));
        weights.push(0.5 * w);
    }
    (nodes, weights)
}

/// Integral of e^{<xi, x>} over the polytope by simplex quadrature with
/// adaptive order, independent of any cone expansion. Dimensions <= 3.
pub fn quad_integral(p: &Polytope, xi: &Xi, ip: &InnerProduct, rel_tol: f64) -> Result<(f64, f64)> {
    let k = p.dim();
    if k > 3 {
        return Err(Error::Invalid(
            "quadrature oracle is limited to dim <= 3".into(),
        ));
    }
    let simplices = crate::hull::triangulate_points(p.vertices())?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let eval = |x: &[f64]| -> (f64, f64) {
        // <xi, x> with float data; ip pairing via the gram matrix.
        let n = x.len();
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..n {
            let mut gx = 0.0;
            for j in 0..n {
                gx += ip.gram().get(i, j).to_f64().unwrap_or(f64::NAN) * x[j];
            }
            re += xi.re[i].to_f64().unwrap_or(f64::NAN) * gx;
            im += xi.im2pi[i].to_f64().unwrap_or(f64::NAN) * gx * two_pi;
        }
        let e = re.exp();
        (e * im.cos(), e * im.sin())
    };
    if k == 0 {
        // A single point: e^{<xi, v>} with the point-measure convention.
        let v: Vec<f64> = p.vertices()[0]
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect();
        return Ok(eval(&v));
    }
    let mut prev: Option<(f64, f64)> = None;
    for order in [8usize, 12, 16, 24, 32, 48, 64] {
        let (nodes, weights) = gauss_legendre_unit(order);
        let mut total = (0.0f64, 0.0f64);
        for s in &simplices {
            if s.len() != k + 1 {
                continue; // degenerate piece
            }
            let base: Vec<f64> = s[0]
                .iter()
                .map(|c| c.to_f64().unwrap_or(f64::NAN))
                .collect();
            let edges: Vec<Vec<f64>> = s[1..]
                .iter()
                .map(|v| {
                    v.iter()
                        .zip(&s[0])
                        .map(|(a, b)| (a - b).to_f64().unwrap_or(f64::NAN))
                        .collect()
                })
                .collect();
            // Euclidean k-volume factor of the affine map: the integral over
            // the coordinate simplex {lam >= 0, sum <= 1} carries it.
            let m = QMatrix::from_columns_with_dim(
                p.ambient_dim(),
                &s[1..].iter().map(|v| sub_vec(v, &s[0])).collect::<Vec<_>>(),
            );
            let gram = m.transpose().mul(ip.gram()).mul(&m).det();
            let vol_factor = gram.to_f64().unwrap_or(f64::NAN).sqrt();
            // Stick-breaking map from the unit cube onto the coordinate
            // simplex: lam_j = u_j * prod_{i<j}(1-u_i), with Jacobian
            // prod_j (1-u_j)^{k-1-j}.
            let acc = cube_quad(k, &nodes, &weights, &mut |u: &[f64]| {
                let mut lam = vec![0.0f64; k];
                let mut remaining = 1.0;
                let mut jac = 1.0;
                for j in 0..k {
                    lam[j] = u[j] * remaining;
                    jac *= remaining;
                    remaining *= 1.0 - u[j];
                }
                let mut x = base.clone();
                for (j, l) in lam.iter().enumerate() {
                    for (xi_c, e) in x.iter_mut().zip(&edges[j]) {
                        *xi_c += l * e;
                    }
                }
                let (re, im) = eval(&x);
                (re * jac, im * jac)
            });
            total.0 += vol_factor * acc.0;
            total.1 += vol_factor * acc.1;
        }
        if let Some(p0) = prev {
            let diff = ((total.0 - p0.0).powi(2) + (total.1 - p0.1).powi(2)).sqrt();
            let scale = (total.0.powi(2) + total.1.powi(2)).sqrt().max(1e-300);
            if diff / scale < rel_tol {
                return Ok(total);
            }
        }
        prev = Some(total);
    }
    Err(Error::ToleranceNotReached)
}

/// Tensor-product quadrature of a complex-valued integrand over [0,1]^k.
fn cube_quad(
    k: usize,
    nodes: &[f64],
    weights: &[f64],
    f: &mut dyn FnMut(&[f64]) -> (f64, f64),
) -> (f64, f64) {
    let mut idx = vec![0usize; k];
    let mut acc = (0.0, 0.0);
    'outer: loop {
        let u: Vec<f64> = idx.iter().map(|&i| nodes[i]).collect();
        let w: f64 = idx.iter().map(|&i| weights[i]).product();
        let (re, im) = f(&u);
        acc.0 += w * re;
        acc.1 += w * im;
        for j in 0..k {
            idx[j] += 1;
            if idx[j] < nodes.len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::qvec;
    use crate::rat::{rat, rat_int};

    fn ip2() -> InnerProduct {
        InnerProduct::standard(2)
    }

    #[test]
    fn unit_square_count() {
        let p = Polytope::from_vertices(
            &[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])],
            &ip2(),
        )
        .unwrap();
        let (pts, sum) = lattice_enum_sum(
            &p,
            &Lattice::standard(2),
            &qvec(&[0, 0]),
            &Xi::zero(2),
            &ip2(),
            128,
        )
        .unwrap();
        assert_eq!(pts.len(), 4);
        assert!((sum.re.to_f64() - 4.0).abs() < 1e-30);
    }

    #[test]
    fn shifted_lattice_count() {
        // [0,2]^2 with shift (1/2, 1/2): 4 points.
        let p = Polytope::from_vertices(
            &[qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 2]), qvec(&[2, 2])],
            &ip2(),
        )
        .unwrap();
        let shift = vec![rat(1, 2), rat(1, 2)];
        let pts = lattice_points(&p, &Lattice::standard(2), &shift).unwrap();
        assert_eq!(pts.len(), 4);
    }

    #[test]
    fn ehrhart_tables_match_formulas() {
        let sq = Polytope::from_vertices(
            &[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])],
            &ip2(),
        )
        .unwrap();
        let t = ehrhart_table(&sq, &Lattice::standard(2), 5).unwrap();
        let expect: Vec<BigInt> = (1..=5i64)
            .map(|t| BigInt::from((t + 1) * (t + 1)))
            .collect();
        assert_eq!(t, expect);

        let tri = Polytope::from_vertices(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])], &ip2())
            .unwrap();
        let t = ehrhart_table(&tri, &Lattice::standard(2), 6).unwrap();
        let expect: Vec<BigInt> = (1..=6i64)
            .map(|t| BigInt::from((t + 1) * (t + 2) / 2))
            .collect();
        assert_eq!(t, expect);

        let half = Polytope::from_vertices(
            &[vec![rat_int(0)], vec![rat(1, 2)]],
            &InnerProduct::standard(1),
        )
        .unwrap();
        let t = ehrhart_table(&half, &Lattice::standard(1), 8).unwrap();
        let expect: Vec<BigInt> = (1..=8i64).map(|t| BigInt::from(t / 2 + 1)).collect();
        assert_eq!(t, expect);
    }

    #[test]
    fn interval_quadrature() {
        let p = Polytope::from_vertices(
            &[vec![rat_int(0)], vec![rat_int(1)]],
            &InnerProduct::standard(1),
        )
        .unwrap();
        let xi = Xi::real(qvec(&[1]));
        let (re, im) = quad_integral(&p, &xi, &InnerProduct::standard(1), 1e-13).unwrap();
        assert!((re - (std::f64::consts::E - 1.0)).abs() < 1e-12);
        assert!(im.abs() < 1e-12);
    }

    #[test]
    fn square_quadrature_separates() {
        let p = Polytope::from_vertices(
            &[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])],
            &ip2(),
        )
        .unwrap();
        let xi = Xi::real(qvec(&[1, 1]));
        let (re, _) = quad_integral(&p, &xi, &ip2(), 1e-13).unwrap();
        let e1 = std::f64::consts::E - 1.0;
        assert!((re - e1 * e1).abs() < 1e-11);
    }

    #[test]
    fn volume_at_zero_xi() {
        let p = Polytope::from_vertices(
            &[qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 2]), qvec(&[2, 2])],
            &ip2(),
        )
        .unwrap();
        let (re, im) = quad_integral(&p, &Xi::zero(2), &ip2(), 1e-13).unwrap();
        assert!((re - 4.0).abs() < 1e-11);
        assert!(im.abs() < 1e-12);
    }
}
