//! The exponent functional, its face decomposition, flags, and the
//! reduction of a general functional to an adapted one on a finite-index
//! sublattice.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::inner::InnerProduct;
use crate::lattice::{congruence_lattice, Lattice};
use crate::matrix::{is_zero_vec, QMatrix, QVector};
use crate::polytope::FaceLattice;
use crate::rat::{fract, Rat};

/// The functional x -> <re, x> + 2*pi*i*<im2pi, x>, with both components
/// rational vector representatives pairing through the inner product.
/// Restricting to this class makes "e^{<xi, lambda>} = 1" decidable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Xi {
    pub re: QVector,
    pub im2pi: QVector,
}

impl Xi {
    pub fn new(re: QVector, im2pi: QVector) -> Self {
        assert_eq!(re.len(), im2pi.len());
        Xi { re, im2pi }
    }

    pub fn real(re: QVector) -> Self {
        let n = re.len();
        Xi {
            re,
            im2pi: vec![Rat::zero(); n],
        }
    }

    pub fn zero(n: usize) -> Self {
        Xi {
            re: vec![Rat::zero(); n],
            im2pi: vec![Rat::zero(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.re.len()
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.re) && is_zero_vec(&self.im2pi)
    }

    /// Exact pairing with a rational point: (<re,x>, <im2pi,x>).
    pub fn pair(&self, ip: &InnerProduct, x: &[Rat]) -> (Rat, Rat) {
        (ip.pair(&self.re, x), ip.pair(&self.im2pi, x))
    }

    /// True if e^{<xi, x>} = 1, i.e. <re,x> = 0 and <im2pi,x> integral.
    pub fn exp_is_one(&self, ip: &InnerProduct, x: &[Rat]) -> bool {
        let (re, im) = self.pair(ip, x);
        re.is_zero() && im.denom().is_one()
    }

    /// True if the functional vanishes on the column span of `w`.
    pub fn vanishes_on(&self, ip: &InnerProduct, w: &QMatrix) -> bool {
        (0..w.ncols()).all(|j| {
            let c = w.col(j);
            ip.pair(&self.re, &c).is_zero() && ip.pair(&self.im2pi, &c).is_zero()
        })
    }

    /// Applies a projection matrix to both representatives. Orthogonal
    /// projections are self-adjoint, so this is the restriction to the
    /// image extended by zero on the complement.
    pub fn projected(&self, proj: &QMatrix) -> Xi {
        Xi {
            re: proj.mul_vec(&self.re),
            im2pi: proj.mul_vec(&self.im2pi),
        }
    }
}

/// The set of xi-constant faces and its distinguished subsets.
#[derive(Clone, Debug)]
pub struct XiDecomposition {
    pub constant_faces: Vec<usize>,
    pub maximal_faces: Vec<usize>,
    pub good_faces: Vec<usize>,
}

/// A face is xi-constant iff both components vanish on its direction space.
pub fn xi_decomposition(fl: &FaceLattice, xi: &Xi, ip: &InnerProduct) -> XiDecomposition {
    let constant: Vec<usize> = fl
        .faces
        .iter()
        .filter(|f| xi.vanishes_on(ip, &f.lin_basis))
        .map(|f| f.id)
        .collect();
    let is_constant = |id: usize| constant.contains(&id);
    let maximal: Vec<usize> = constant
        .iter()
        .copied()
        .filter(|&id| fl.strict_superfaces(id).iter().all(|&s| !is_constant(s)))
        .collect();
    let good: Vec<usize> = constant
        .iter()
        .copied()
        .filter(|&id| {
            let containing: Vec<usize> = maximal
                .iter()
                .copied()
                .filter(|&m| fl.contains_face(id, m))
                .collect();
            containing.len() == 1
        })
        .collect();
    XiDecomposition {
        constant_faces: constant,
        maximal_faces: maximal,
        good_faces: good,
    }
}

/// A chain of faces, strictly increasing by inclusion, stored by face id.
pub type Flag = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlagMode {
    /// Saturated flags from f to the whole polytope.
    AllSaturated,
    /// Saturated flags from f to the polytope with every face above f not
    /// xi-constant.
    XiAdapted,
    /// All chains of xi-constant faces starting at f (any length, not
    /// required saturated, not required to end at the polytope).
    XiMaladapted,
}

pub fn flags(
    fl: &FaceLattice,
    f: usize,
    mode: FlagMode,
    xi: &Xi,
    ip: &InnerProduct,
) -> Result<Vec<Flag>> {
    let top = fl.top();
    match mode {
        FlagMode::AllSaturated => Ok(saturated_flags(fl, f, top, |_| true)),
        FlagMode::XiAdapted => {
            let dec = xi_decomposition(fl, xi, ip);
            let ok = |id: usize| !dec.constant_faces.contains(&id);
            // The start face is exempt from the constancy condition; so is
            // the single-element flag [p] when f = p.
            Ok(saturated_flags(fl, f, top, ok))
        }
        FlagMode::XiMaladapted => {
            let dec = xi_decomposition(fl, xi, ip);
            if !dec.constant_faces.contains(&f) {
                return Err(Error::NotXiConstant);
            }
            let mut out = Vec::new();
            let mut stack: Vec<Flag> = vec![vec![f]];
            while let Some(chain) = stack.pop() {
                out.push(chain.clone());
                let last = *chain.last().unwrap();
                for &next in &dec.constant_faces {
                    if next != last && fl.contains_face(last, next) {
                        let mut c = chain.clone();
                        c.push(next);
                        stack.push(c);
                    }
                }
            }
            out.sort();
            Ok(out)
        }
    }
}

/// Saturated chains from f to `end` where every intermediate-and-final face
/// satisfies `admit` (the start face is exempt).
fn saturated_flags(
    fl: &FaceLattice,
    f: usize,
    end: usize,
    admit: impl Fn(usize) -> bool,
) -> Vec<Flag> {
    let mut out = Vec::new();
    let mut stack: Vec<Flag> = vec![vec![f]];
    while let Some(chain) = stack.pop() {
        let last = *chain.last().unwrap();
        if last == end {
            out.push(chain);
            continue;
        }
        for &c in &fl.covers[last] {
            if admit(c) && fl.contains_face(c, end) {
                let mut chain2 = chain.clone();
                chain2.push(c);
                stack.push(chain2);
            }
        }
    }
    out.sort();
    out
}

/// The reduction data: xi' vanishing on the span of the sublattice on which
/// e^{<xi, .>} = 1, the finite-index lattice on which xi' is adapted, and
/// the coset weights that reassemble the original sum.
#[derive(Clone, Debug)]
pub struct XiPrimeData {
    pub xi_prime: Xi,
    /// Sublattice of L on which e^{<xi, lambda>} = 1.
    pub lambda_bar_prime: Lattice,
    /// Basis of V' = span of lambda_bar_prime.
    pub v_prime: QMatrix,
    /// Finite-index sublattice of L with xi' adapted on it.
    pub lambda_prime: Lattice,
    /// Per coset of L/lambda_prime: (representative, weight exponent pair
    /// (<re, g^{V'}>, <im2pi, g^{V'}> mod 1)).
    pub cosets: Vec<(QVector, (Rat, Rat))>,
}

/// Computes the (xi, Lambda)-reduction. The identity
/// S_L(p; xi) = sum over cosets of e^{<xi, g^{V'}>} S_{[g]+L'}(p; xi')
/// is exercised in tests.
pub fn xi_prime(l: &Lattice, xi: &Xi, ip: &InnerProduct) -> XiPrimeData {
    let n = l.ambient_dim();
    // lambda_bar_prime = {lambda in L : <re, lambda> = 0, <im2pi, lambda> in Z}.
    let lambda_bar_prime = exp_one_sublattice(l, &xi.re, &xi.im2pi, ip);
    let v_prime = lambda_bar_prime.basis().column_basis();
    // xi' = xi composed with projection onto the orthogonal complement of
    // V'; projections are self-adjoint so we project the representatives.
    let perp = ip.perp_basis(&v_prime);
    let proj_perp = ip.projection_matrix(&perp);
    let xi_p = xi.projected(&proj_perp);
    // lambda_prime = {lambda in L : e^{<xi, lambda^{V'}>} = 1}, the
    // sublattice on which e^{<xi, .>} and e^{<xi', .>} agree. Since
    // orthogonal projection is self-adjoint this is the exp-one sublattice
    // for the projected representatives.
    let lambda_prime = if v_prime.ncols() == 0 {
        l.clone()
    } else {
        let proj_v = ip.projection_matrix(&v_prime);
        exp_one_sublattice(l, &proj_v.mul_vec(&xi.re), &proj_v.mul_vec(&xi.im2pi), ip)
    };
    // Cosets and weights.
    let reps = l
        .cosets_mod(&lambda_prime)
        .expect("lambda_prime has finite index");
    let proj_v = if v_prime.ncols() == 0 {
        QMatrix::zeros(n, n)
    } else {
        ip.projection_matrix(&v_prime)
    };
    let cosets = reps
        .into_iter()
        .map(|g| {
            let gv = proj_v.mul_vec(&g);
            let re_w = ip.pair(&xi.re, &gv);
            let im_w = fract(&ip.pair(&xi.im2pi, &gv));
            (g, (re_w, im_w))
        })
        .collect();
    XiPrimeData {
        xi_prime: xi_p,
        lambda_bar_prime,
        v_prime,
        lambda_prime,
        cosets,
    }
}

/// The sublattice {lambda in L : <re, lambda> = 0 and <im, lambda> in Z};
/// exactly the lattice points where e^{<re + 2 pi i im, lambda>} = 1.
fn exp_one_sublattice(l: &Lattice, re: &[Rat], im: &[Rat], ip: &InnerProduct) -> Lattice {
    let n = l.ambient_dim();
    let b = l.basis();
    let r = l.rank();
    let re_row: QVector = (0..r).map(|j| ip.pair(re, &b.col(j))).collect();
    let im_row: QVector = (0..r).map(|j| ip.pair(im, &b.col(j))).collect();
    // Integer kernel of the re row.
    let re_m = QMatrix::from_rows(vec![re_row]);
    let kernel = {
        let (_, mi) = re_m.clear_denominators();
        let (h, u) = crate::normal_forms::hnf_columns(&mi);
        let mut cols = Vec::new();
        for j in 0..h.ncols() {
            if (0..h.nrows()).all(|i| h.get(i, j).is_zero()) {
                cols.push(
                    (0..u.nrows())
                        .map(|i| Rat::from_integer(u.get(i, j).clone()))
                        .collect::<QVector>(),
                );
            }
        }
        QMatrix::from_columns_with_dim(r, &cols)
    };
    // Inside the kernel, require <im, B K y> integral.
    let im_on_kernel = QMatrix::from_rows(vec![kernel
        .columns()
        .iter()
        .map(|c| crate::matrix::dot(&im_row, c))
        .collect::<QVector>()]);
    let y_basis = congruence_lattice(&im_on_kernel);
    let mut gens = Vec::new();
    for j in 0..y_basis.ncols() {
        let x = kernel.mul_vec(&y_basis.col(j));
        gens.push(b.mul_vec(&x));
    }
    Lattice::from_generators(n, &gens)
}

/// True iff xi lies in (V*_C)^G: e^{<xi,g>} = 1 with g in G forces
/// <xi, g> = 0.
pub fn is_adapted_point(xi: &Xi, g: &Lattice, ip: &InnerProduct) -> bool {
    let data = xi_prime(g, xi, ip);
    // On lambda_bar_prime the exponential is 1; adapted iff the functional
    // itself vanishes there. The re part vanishes by construction, so only
    // the imaginary part needs checking.
    data.lambda_bar_prime
        .basis_columns()
        .iter()
        .all(|c| ip.pair(&xi.im2pi, c).is_zero())
}

/// Convenience: the index [L : L'] as a BigInt.
pub fn reduction_index(data: &XiPrimeData) -> BigInt {
    BigInt::from(data.cosets.len() as u64)
}
