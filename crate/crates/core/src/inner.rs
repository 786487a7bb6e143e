//! Rational inner products and orthogonal projections.
//!
//! Functionals are represented by vectors of the ambient space and pair
//! through the inner product, mirroring the identification of V with its
//! dual that an inner product provides.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{QMatrix, QVector};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProduct {
    gram: QMatrix,
}

impl InnerProduct {
    pub fn standard(n: usize) -> Self {
        InnerProduct {
            gram: QMatrix::identity(n),
        }
    }

    /// Builds from a symmetric positive definite rational Gram matrix.
    pub fn new(gram: QMatrix) -> Result<Self> {
        if gram.nrows() != gram.ncols() {
            return Err(Error::DimensionMismatch(
                "gram matrix must be square".into(),
            ));
        }
        if !gram.is_symmetric() {
            return Err(Error::Invalid("gram matrix must be symmetric".into()));
        }
        // Positive definiteness via leading principal minors.
        for k in 1..=gram.nrows() {
            let mut minor = QMatrix::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    minor.set(i, j, gram.get(i, j).clone());
                }
            }
            if minor.det() <= Rat::zero() {
                return Err(Error::Invalid(
                    "gram matrix is not positive definite".into(),
                ));
            }
        }
        Ok(InnerProduct { gram })
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    /// <u, v> = u^T A v.
    pub fn pair(&self, u: &[Rat], v: &[Rat]) -> Rat {
        crate::matrix::dot(&self.gram.mul_vec(v), u)
    }

    pub fn norm_sq(&self, u: &[Rat]) -> Rat {
        self.pair(u, u)
    }

    /// Matrix of the orthogonal projection onto the column span of `w`.
    pub fn projection_matrix(&self, w: &QMatrix) -> QMatrix {
        let n = self.dim();
        if w.ncols() == 0 {
            return QMatrix::zeros(n, n);
        }
        let wt_a = w.transpose().mul(&self.gram);
        let gram_w = wt_a.mul(w);
        let inv = gram_w
            .inverse()
            .expect("projection basis must be independent");
        w.mul(&inv).mul(&wt_a)
    }

    pub fn project(&self, w: &QMatrix, v: &[Rat]) -> QVector {
        self.projection_matrix(w).mul_vec(v)
    }

    /// Basis of the orthogonal complement of the column span of `w`.
    pub fn perp_basis(&self, w: &QMatrix) -> QMatrix {
        if w.ncols() == 0 {
            return QMatrix::identity(self.dim());
        }
        w.transpose().mul(&self.gram).kernel()
    }

    /// True if the column spans of `a` and `b` are orthogonal.
    pub fn spans_orthogonal(&self, a: &QMatrix, b: &QMatrix) -> bool {
        for i in 0..a.ncols() {
            for j in 0..b.ncols() {
                if !self.pair(&a.col(i), &b.col(j)).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}
