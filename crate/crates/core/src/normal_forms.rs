//! Hermite and Smith normal forms over the integers, with transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::QMatrix;
use crate::rat::Rat;

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(v));
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IMatrix) -> IMatrix {
        assert_eq!(self.cols, other.rows);
        let mut m = IMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k).clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = m.get(i, j) + &a * other.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn transpose(&self) -> IMatrix {
        let mut t = IMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        let mut m = QMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, Rat::from_integer(self.get(i, j).clone()));
            }
        }
        m
    }

    pub fn det(&self) -> BigInt {
        let d = self.to_qmatrix().det();
        assert!(d.denom().is_one());
        d.numer().clone()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_i += k * row_j
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        for c in 0..self.cols {
            let v = self.get(i, c) + k * self.get(j, c);
            self.set(i, c, v);
        }
    }

    /// col_i += k * col_j
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = self.get(r, i) + k * self.get(r, j);
            self.set(r, i, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self.get(i, c).clone();
            self.set(i, c, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let v = -self.get(r, j).clone();
            self.set(r, j, v);
        }
    }
}

/// Row-style Hermite normal form: returns (H, U) with U unimodular and
/// U * M = H, H in row echelon form with positive pivots and entries above
/// each pivot reduced into [0, pivot).
pub fn hnf_rows(m: &IMatrix) -> (IMatrix, IMatrix) {
    let mut h = m.clone();
    let mut u = IMatrix::identity(m.nrows());
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Euclidean elimination below position (r, c).
        loop {
            let mut piv: Option<usize> = None;
            for i in r..rows {
                if !h.get(i, c).is_zero() {
                    piv = match piv {
                        None => Some(i),
                        Some(p) => {
                            if h.get(i, c).abs() < h.get(p, c).abs() {
                                Some(i)
                            } else {
                                Some(p)
                            }
                        }
                    };
                }
            }
            let Some(p) = piv else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            if h.get(r, c).is_negative() {
                h.negate_row(r);
                u.negate_row(r);
            }
            let mut done = true;
            for i in r + 1..rows {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = h.get(i, c).div_floor(h.get(r, c));
                let neg_q = -q;
                h.add_row(i, r, &neg_q);
                u.add_row(i, r, &neg_q);
                if !h.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        // Reduce entries above the pivot into [0, pivot).
        for i in 0..r {
            let q = h.get(i, c).div_floor(h.get(r, c));
            if !q.is_zero() {
                let neg_q = -q;
                h.add_row(i, r, &neg_q);
                u.add_row(i, r, &neg_q);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Column-style Hermite normal form: (H, U) with M * U = H; H is the
/// transpose image of the row-style form of Mᵀ. Zero columns come last.
pub fn hnf_columns(m: &IMatrix) -> (IMatrix, IMatrix) {
    let (h_t, u_t) = hnf_rows(&m.transpose());
    (h_t.transpose(), u_t.transpose())
}

/// Smith normal form data: m = u * s * v with u, v unimodular and s diagonal
/// with d_1 | d_2 | ... | d_k, d_i > 0, followed by zeros.
#[derive(Clone, Debug)]
pub struct Snf {
    pub s: IMatrix,
    pub u: IMatrix,
    pub v: IMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.s.nrows().min(self.s.ncols());
        (0..k).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Smith normal form. Maintains m = u * s * v as an invariant: every
/// elementary operation applied to s is compensated in u or v.
pub fn snf(m: &IMatrix) -> Snf {
    let mut s = m.clone();
    let (rows, cols) = (s.nrows(), s.ncols());
    let mut u = IMatrix::identity(rows);
    let mut v = IMatrix::identity(cols);

    let mut t = 0;
    'outer: while t < rows.min(cols) {
        // Find a nonzero pivot in the trailing block.
        let mut piv: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !s.get(i, j).is_zero() {
                    piv = match piv {
                        None => Some((i, j)),
                        Some((pi, pj)) => {
                            if s.get(i, j).abs() < s.get(pi, pj).abs() {
                                Some((i, j))
                            } else {
                                Some((pi, pj))
                            }
                        }
                    };
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        // Row swap: s <- L s with L the swap; compensate u <- u L.
        s.swap_rows(t, pi);
        u.swap_cols(t, pi);
        s.swap_cols(t, pj);
        v.swap_rows(t, pj);
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_col(t);
        }

        // Clear row and column t.
        let mut dirty = false;
        for i in t + 1..rows {
            if s.get(i, t).is_zero() {
                continue;
            }
            let q = s.get(i, t).div_floor(s.get(t, t));
            if !q.is_zero() {
                let neg_q = -&q;
                // s <- L s with L = (row_i += -q row_t); u <- u L^{-1}.
                s.add_row(i, t, &neg_q);
                u.add_col(t, i, &q);
            }
            if !s.get(i, t).is_zero() {
                dirty = true;
            }
        }
        for j in t + 1..cols {
            if s.get(t, j).is_zero() {
                continue;
            }
            let q = s.get(t, j).div_floor(s.get(t, t));
            if !q.is_zero() {
                let neg_q = -&q;
                // s <- s R with R = (col_j += -q col_t); v <- R^{-1} v.
                s.add_col(j, t, &neg_q);
                v.add_row(t, j, &q);
            }
            if !s.get(t, j).is_zero() {
                dirty = true;
            }
        }
        if dirty {
            continue 'outer; // remainders left, repeat with smaller pivot
        }
        // Enforce divisibility d_t | everything in the trailing block.
        for i in t + 1..rows {
            for j in t + 1..cols {
                if !(s.get(i, j) % s.get(t, t)).is_zero() {
                    // Fold row i into row t and restart this step.
                    let one = BigInt::one();
                    s.add_row(t, i, &one);
                    let neg_one = -BigInt::one();
                    u.add_col(i, t, &neg_one);
                    continue 'outer;
                }
            }
        }
        t += 1;
    }
    Snf { s, u, v }
}

/// Which canonical form to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    Hnf,
    Snf,
}

/// Canonical forms of a rational matrix: denominators are cleared first and
/// the scaling factor is returned alongside. For HNF the transform list is
/// [U] with (d*M)*U = H; for SNF it is [U, V] with d*M = U*S*V.
pub fn canonical_forms(m: &QMatrix, kind: FormKind) -> (BigInt, IMatrix, Vec<IMatrix>) {
    let (d, mi) = m.clear_denominators();
    match kind {
        FormKind::Hnf => {
            let (h, u) = hnf_columns(&mi);
            (d, h, vec![u])
        }
        FormKind::Snf => {
            let f = snf(&mi);
            (d, f.s, vec![f.u, f.v])
        }
    }
}
