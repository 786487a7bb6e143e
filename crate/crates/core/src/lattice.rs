//! Lattices with rational bases: sections, projections, cosets, covolumes.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::inner::InnerProduct;
use crate::matrix::{is_zero_vec, QMatrix, QVector};
use crate::normal_forms::{hnf_columns, snf, IMatrix};
use crate::rat::{lcm_denoms, Rat};

/// A lattice given by a basis whose columns are Q-linearly independent
/// vectors. The basis is canonicalized on construction (scaled column HNF),
/// so equal lattices compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    ambient_dim: usize,
    basis: QMatrix,
}

impl Lattice {
    pub fn standard(n: usize) -> Self {
        Lattice {
            ambient_dim: n,
            basis: QMatrix::identity(n),
        }
    }

    /// Rank-zero lattice {0}.
    pub fn zero(ambient_dim: usize) -> Self {
        Lattice {
            ambient_dim,
            basis: QMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn from_basis(ambient_dim: usize, cols: &[QVector]) -> Result<Self> {
        let m = QMatrix::from_columns_with_dim(ambient_dim, cols);
        if m.rank() != cols.len() {
            return Err(Error::Invalid(
                "lattice basis must be linearly independent".into(),
            ));
        }
        Ok(Self::from_generators(ambient_dim, cols))
    }

    /// Lattice generated by possibly dependent rational vectors.
    pub fn from_generators(ambient_dim: usize, cols: &[QVector]) -> Self {
        let m = QMatrix::from_columns_with_dim(ambient_dim, cols);
        let canon = canonical_basis(&m);
        Lattice {
            ambient_dim,
            basis: canon,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn basis_columns(&self) -> Vec<QVector> {
        self.basis.columns()
    }

    /// Rational coordinates of v in the basis, if v lies in the span.
    pub fn span_coords(&self, v: &[Rat]) -> Option<QVector> {
        if self.rank() == 0 {
            return if is_zero_vec(v) {
                Some(Vec::new())
            } else {
                None
            };
        }
        self.basis.solve(v)
    }

    pub fn in_span(&self, v: &[Rat]) -> bool {
        self.span_coords(v).is_some()
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        match self.span_coords(v) {
            None => false,
            Some(c) => c.iter().all(|x| x.denom().is_one()),
        }
    }

    /// Reduces v modulo the lattice into the half-open fundamental
    /// parallelepiped of the basis; v must lie in the span.
    pub fn reduce_mod(&self, v: &[Rat]) -> QVector {
        let c = self.span_coords(v).expect("vector outside lattice span");
        let frac: QVector = c.iter().map(crate::rat::fract).collect();
        self.basis.mul_vec(&frac)
    }

    /// Index of a full-rank sublattice.
    pub fn index_of(&self, sub: &Lattice) -> Result<BigInt> {
        if sub.rank() != self.rank() {
            return Err(Error::NotFiniteIndex);
        }
        let m = self.coords_matrix(sub)?;
        let (d, mi) = m.clear_denominators();
        if !d.is_one() {
            return Err(Error::NotFiniteIndex);
        }
        let det = mi.det();
        if det.is_zero() {
            return Err(Error::NotFiniteIndex);
        }
        Ok(det.abs())
    }

    /// Matrix whose columns are the coordinates of sub's basis in self's
    /// basis (rational in general, integral when sub is a sublattice).
    fn coords_matrix(&self, sub: &Lattice) -> Result<QMatrix> {
        let mut cols = Vec::new();
        for b in sub.basis_columns() {
            let c = self
                .span_coords(&b)
                .ok_or_else(|| Error::Invalid("not a sublattice: span mismatch".into()))?;
            cols.push(c);
        }
        Ok(QMatrix::from_columns_with_dim(self.rank(), &cols))
    }

    /// Coset representatives of self modulo a full-rank sublattice, chosen
    /// inside the half-open fundamental parallelepiped of the sublattice.
    pub fn cosets_mod(&self, sub: &Lattice) -> Result<Vec<QVector>> {
        let m = self.coords_matrix(sub)?;
        let (d, mi) = m.clear_denominators();
        if !d.is_one() || sub.rank() != self.rank() {
            return Err(Error::NotFiniteIndex);
        }
        let f = snf(&mi);
        // self = B Z^r, sub = B * mi Z^r = (B u) s Z^r  with  mi = u s v.
        let bu = self.basis.mul(&f.u.to_qmatrix());
        let diag = f.diagonal();
        if diag.iter().any(|x| x.is_zero()) {
            return Err(Error::NotFiniteIndex);
        }
        let mut reps: Vec<QVector> = vec![Vec::new()];
        for d_i in &diag {
            let mut next = Vec::new();
            let mut c = BigInt::zero();
            while &c < d_i {
                for r in &reps {
                    let mut r2 = r.clone();
                    r2.push(Rat::from_integer(c.clone()));
                    next.push(r2);
                }
                c += 1;
            }
            reps = next;
        }
        Ok(reps.into_iter().map(|c| bu.mul_vec(&c)).collect())
    }

    /// gr(L)^2: determinant of the Gram matrix of the basis. Stored squared
    /// so the value stays rational.
    pub fn gram_det_sq(&self, ip: &InnerProduct) -> Rat {
        if self.rank() == 0 {
            return Rat::one();
        }
        self.basis.transpose().mul(ip.gram()).mul(&self.basis).det()
    }
}

/// Canonical basis of the column span over Z: scale to integers, column HNF,
/// drop zero columns, scale back.
fn canonical_basis(m: &QMatrix) -> QMatrix {
    if m.ncols() == 0 {
        return m.clone();
    }
    let (d, mi) = m.clear_denominators();
    let (h, _) = hnf_columns(&mi);
    let mut cols = Vec::new();
    for j in 0..h.ncols() {
        let col: QVector = (0..h.nrows())
            .map(|i| Rat::new(h.get(i, j).clone(), d.clone()))
            .collect();
        if !is_zero_vec(&col) {
            cols.push(col);
        }
    }
    QMatrix::from_columns_with_dim(m.nrows(), &cols)
}

/// Integer solutions {x in Z^r : c x in Z^s}, returned as columns of a basis
/// of the solution lattice (full rank r).
pub fn congruence_lattice(c: &QMatrix) -> QMatrix {
    let r = c.ncols();
    if c.nrows() == 0 {
        return QMatrix::identity(r);
    }
    let m = lcm_denoms((0..c.nrows()).flat_map(|i| c.row(i).iter()));
    // c' x + m z = 0 over Z with c' = m*c integral.
    let s = c.nrows();
    let mut stacked = IMatrix::zeros(s, r + s);
    for i in 0..s {
        for j in 0..r {
            let x = c.get(i, j);
            stacked.set(i, j, x.numer() * (&m / x.denom()));
        }
        stacked.set(i, r + i, m.clone());
    }
    // Kernel over Z via column HNF: columns of U aligned with zero columns
    // of H form a basis of the kernel.
    let (h, u) = hnf_columns(&stacked);
    let mut sols = Vec::new();
    for j in 0..h.ncols() {
        let zero = (0..h.nrows()).all(|i| h.get(i, j).is_zero());
        if zero {
            let col: QVector = (0..r)
                .map(|i| Rat::from_integer(u.get(i, j).clone()))
                .collect();
            sols.push(col);
        }
    }
    let m = QMatrix::from_columns_with_dim(r, &sols);
    canonical_basis(&m)
}

/// Λ ∩ W for a rational subspace W given by a basis.
pub fn lattice_section(l: &Lattice, w: &QMatrix) -> Result<Lattice> {
    check_rational_subspace(l, w)?;
    if l.rank() == 0 || w.ncols() == 0 {
        return Ok(Lattice::zero(l.ambient_dim()));
    }
    // Membership of B x in span(W): ann(W) * B x = 0 where ann rows span
    // the standard-dot annihilator of W.
    let ann = w.transpose().kernel().transpose();
    if ann.nrows() == 0 {
        return Ok(l.clone());
    }
    let prod = ann.mul(l.basis());
    // Solutions over Z of prod * x = 0: special case of the congruence
    // machinery with the target being exactly zero, i.e. kernel over Z.
    let (_, mi) = prod.clear_denominators();
    let (h, u) = hnf_columns(&mi);
    let mut cols = Vec::new();
    for j in 0..h.ncols() {
        if (0..h.nrows()).all(|i| h.get(i, j).is_zero()) {
            let x: QVector = (0..u.nrows())
                .map(|i| Rat::from_integer(u.get(i, j).clone()))
                .collect();
            cols.push(l.basis().mul_vec(&x));
        }
    }
    Ok(Lattice::from_generators(l.ambient_dim(), &cols))
}

/// P_W(Λ): orthogonal projection of the lattice onto a rational subspace.
pub fn lattice_projection(l: &Lattice, w: &QMatrix, ip: &InnerProduct) -> Result<Lattice> {
    check_rational_subspace(l, w)?;
    if w.ncols() == 0 {
        return Ok(Lattice::zero(l.ambient_dim()));
    }
    let p = ip.projection_matrix(w);
    let gens: Vec<QVector> = l.basis_columns().iter().map(|b| p.mul_vec(b)).collect();
    Ok(Lattice::from_generators(l.ambient_dim(), &gens))
}

/// Both Λ ∩ W and P_W(Λ).
pub fn lattice_section_and_projection(
    l: &Lattice,
    w: &QMatrix,
    ip: &InnerProduct,
) -> Result<(Lattice, Lattice)> {
    Ok((lattice_section(l, w)?, lattice_projection(l, w, ip)?))
}

fn check_rational_subspace(l: &Lattice, w: &QMatrix) -> Result<()> {
    if w.ncols() > 0 && w.nrows() != l.ambient_dim() {
        return Err(Error::DimensionMismatch("subspace basis dimension".into()));
    }
    Ok(())
}

/// One coset decomposition of L modulo an orthogonal direct sum L1 ⊕ L2,
/// with the projections φ1, φ2 onto the two summands.
#[derive(Clone, Debug)]
pub struct CosetDecomposition {
    pub sublattice: Lattice,
    pub representatives: Vec<QVector>,
    pub phi1_images: Vec<QVector>,
    pub phi2_images: Vec<QVector>,
}

pub fn coset_representatives(
    l: &Lattice,
    l1: &Lattice,
    l2: &Lattice,
    ip: &InnerProduct,
) -> Result<CosetDecomposition> {
    if !ip.spans_orthogonal(l1.basis(), l2.basis()) {
        return Err(Error::NotOrthogonal);
    }
    if l1.rank() + l2.rank() != l.rank() {
        return Err(Error::NotFiniteIndex);
    }
    let mut gens = l1.basis_columns();
    gens.extend(l2.basis_columns());
    let sub = Lattice::from_generators(l.ambient_dim(), &gens);
    if sub.rank() != l.rank() {
        return Err(Error::NotFiniteIndex);
    }
    let reps = l.cosets_mod(&sub)?;
    let w1 = l1.basis();
    let w2 = l2.basis();
    let p1 = ip.projection_matrix(w1);
    let p2 = ip.projection_matrix(w2);
    let reduce = |lat: &Lattice, v: &QVector| -> QVector {
        if lat.rank() == 0 {
            v.clone()
        } else {
            lat.reduce_mod(v)
        }
    };
    let phi1: Vec<QVector> = reps.iter().map(|g| reduce(l1, &p1.mul_vec(g))).collect();
    let phi2: Vec<QVector> = reps.iter().map(|g| reduce(l2, &p2.mul_vec(g))).collect();
    // When L1 and L2 are the full sections Λ ∩ W_i, the maps φ1, φ2 are
    // bijections onto Λ^{W_i}/Λ_i; pairwise distinct images certify
    // injectivity. For strict sublattices the maps need not be injective.
    let full_sections = lattice_section(l, w1)? == *l1 && lattice_section(l, w2)? == *l2;
    if full_sections {
        for imgs in [&phi1, &phi2] {
            for i in 0..imgs.len() {
                for j in i + 1..imgs.len() {
                    if imgs[i] == imgs[j] {
                        return Err(Error::Invalid(
                            "coset projection failed to be injective".into(),
                        ));
                    }
                }
            }
        }
    }
    Ok(CosetDecomposition {
        sublattice: sub,
        representatives: reps,
        phi1_images: phi1,
        phi2_images: phi2,
    })
}
