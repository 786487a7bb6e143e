//! The bundled test corpus: desk-scale polytopes, lattices, and exponent
//! functionals shared by the verification suites and the CLI.

use crate::error::Result;
use crate::inner::InnerProduct;
use crate::lattice::Lattice;
use crate::matrix::{is_zero_vec, qvec, QVector};
use crate::polytope::Polytope;
use crate::rat::{rat, Rat};
use crate::xi::Xi;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct CorpusInstance {
    pub name: &'static str,
    pub polytope: Polytope,
    pub dim: usize,
    /// A non-standard full-rank lattice for discrete checks.
    pub alt_lattice: Lattice,
}

pub fn standard_corpus() -> Result<Vec<CorpusInstance>> {
    let ip1 = InnerProduct::standard(1);
    let ip2 = InnerProduct::standard(2);
    let ip3 = InnerProduct::standard(3);
    let mut out = Vec::new();
    let mut push =
        |name: &'static str, pts: Vec<QVector>, ip: &InnerProduct, alt: Lattice| -> Result<()> {
            let p = Polytope::from_vertices(&pts, ip)?;
            let dim = p.ambient_dim();
            out.push(CorpusInstance {
                name,
                polytope: p,
                dim,
                alt_lattice: alt,
            });
            Ok(())
        };
    let alt1 = Lattice::from_basis(1, &[vec![rat(1, 2)]])?;
    let alt2 = Lattice::from_basis(2, &[qvec(&[1, 1]), qvec(&[1, -1])])?;
    let alt3 = Lattice::from_basis(3, &[qvec(&[1, 1, 0]), qvec(&[0, 1, 1]), qvec(&[0, 0, 2])])?;
    push(
        "interval01",
        vec![qvec(&[0]), qvec(&[1])],
        &ip1,
        alt1.clone(),
    )?;
    push(
        "interval03",
        vec![qvec(&[0]), qvec(&[3])],
        &ip1,
        alt1.clone(),
    )?;
    push("halfseg", vec![qvec(&[0]), vec![rat(1, 2)]], &ip1, alt1)?;
    push(
        "unit_square",
        vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])],
        &ip2,
        alt2.clone(),
    )?;
    push(
        "square2",
        vec![qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 2]), qvec(&[2, 2])],
        &ip2,
        alt2.clone(),
    )?;
    push(
        "std_triangle",
        vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])],
        &ip2,
        alt2.clone(),
    )?;
    push(
        "triangle2",
        vec![qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 2])],
        &ip2,
        alt2.clone(),
    )?;
    push(
        "fig1_pentagon",
        vec![
            qvec(&[0, 0]),
            qvec(&[0, 2]),
            qvec(&[1, 3]),
            qvec(&[3, 1]),
            qvec(&[2, -1]),
        ],
        &ip2,
        alt2.clone(),
    )?;
    push(
        "fig2_triangle",
        vec![qvec(&[0, 0]), qvec(&[0, 3]), qvec(&[2, 1])],
        &ip2,
        alt2.clone(),
    )?;
    push(
        "rational_triangle",
        vec![
            qvec(&[0, 0]),
            vec![rat(1, 2), rat(0, 1)],
            vec![rat(0, 1), rat(1, 2)],
        ],
        &ip2,
        alt2,
    )?;
    push(
        "simplex3d",
        vec![
            qvec(&[0, 0, 0]),
            qvec(&[1, 0, 0]),
            qvec(&[0, 1, 0]),
            qvec(&[0, 0, 1]),
        ],
        &ip3,
        alt3.clone(),
    )?;
    push(
        "cube3d",
        (0..8)
            .map(|m| qvec(&[(m & 1) as i64, ((m >> 1) & 1) as i64, ((m >> 2) & 1) as i64]))
            .collect(),
        &ip3,
        alt3,
    )?;
    Ok(out)
}

/// Deterministic generic real functionals for an instance: nonzero pairing
/// with every edge direction of the polytope.
pub fn generic_functionals(p: &Polytope, count: usize, seed: u64) -> Vec<Xi> {
    let fl = crate::polytope::face_lattice(p);
    let ip = p.inner_product().clone();
    let mut dirs: Vec<QVector> = Vec::new();
    for e in fl.faces_of_dim(1) {
        dirs.push(fl.faces[e].lin_basis.col(0));
    }
    let n = p.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let cand: QVector = (0..n)
            .map(|_| Rat::from_integer(rng.gen_range(-7i64..=7).into()))
            .collect();
        if is_zero_vec(&cand) {
            continue;
        }
        if dirs.iter().all(|d| !ip.pair(&cand, d).is_zero()) {
            out.push(Xi::real(cand));
        }
    }
    out
}

/// The degenerate functional used by the worked planar examples.
pub fn xi_degenerate_2d() -> Xi {
    Xi::real(qvec(&[1, 0]))
}
