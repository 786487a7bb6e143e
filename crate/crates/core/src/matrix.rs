//! Dense rational vectors and matrices with exact arithmetic.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::Rat;

pub type QVector = Vec<Rat>;

pub fn qvec(entries: &[i64]) -> QVector {
    entries
        .iter()
        .map(|&n| Rat::from_integer(n.into()))
        .collect()
}

pub fn zero_vec(n: usize) -> QVector {
    vec![Rat::zero(); n]
}

pub fn is_zero_vec(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn add_vec(a: &[Rat], b: &[Rat]) -> QVector {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Rat], b: &[Rat]) -> QVector {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(c: &Rat, a: &[Rat]) -> QVector {
    a.iter().map(|x| c * x).collect()
}

/// Standard coordinate-wise dot product (no inner product involved).
pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// Scales a nonzero rational vector to the primitive integer vector on the
/// same ray (direction is preserved).
pub fn primitive_integer(v: &[Rat]) -> QVector {
    use num_bigint::BigInt;
    use num_integer::Integer;
    if is_zero_vec(v) {
        return v.to_vec();
    }
    let l = crate::rat::lcm_denoms(v.iter());
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    ints.iter().map(|x| Rat::from_integer(x / &g)).collect()
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<QVector>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_columns(cols: &[QVector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |col| col.len());
        assert!(cols.iter().all(|col| col.len() == r), "ragged columns");
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors, with an explicit
    /// row count so that zero columns are representable.
    pub fn from_columns_with_dim(rows: usize, cols: &[QVector]) -> Self {
        if cols.is_empty() {
            Self::zeros(rows, 0)
        } else {
            assert!(cols.iter().all(|c| c.len() == rows));
            Self::from_columns(cols)
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> QVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<QVector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut m = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = m.get(i, j) + a * other.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rat]) -> QVector {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn hstack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = QMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).recip();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.get(i, c).is_zero() {
                    let f = self.get(i, c).clone();
                    for j in c..self.cols {
                        let v = self.get(i, j) - &f * self.get(r, j);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// One exact solution of `self * x = b`, or None if inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<QVector> {
        assert_eq!(b.len(), self.rows);
        let mut aug = self.hstack(&QMatrix::from_columns(&[b.to_vec()]));
        let pivots = aug.rref_in_place();
        if pivots.contains(&self.cols) {
            return None; // pivot in the constant column
        }
        let mut x = zero_vec(self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Basis of the null space {x : self * x = 0}, as matrix columns.
    pub fn kernel(&self) -> QMatrix {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::new();
        for &f in &free {
            let mut v = zero_vec(self.cols);
            v[f] = Rat::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -m.get(r, f).clone();
            }
            basis.push(v);
        }
        QMatrix::from_columns_with_dim(self.cols, &basis)
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            det *= m.get(c, c);
            let inv = m.get(c, c).recip();
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) * &inv;
                for j in c..n {
                    let v = m.get(i, j) - &f * m.get(c, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = self.hstack(&QMatrix::identity(n));
        let pivots = aug.rref_in_place();
        if pivots.iter().filter(|&&c| c < n).count() != n {
            return Err(Error::Invalid("singular matrix".into()));
        }
        let mut inv = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// True if v lies in the column span.
    pub fn column_span_contains(&self, v: &[Rat]) -> bool {
        self.solve(v).is_some()
    }

    /// Greedy subset of columns forming a basis of the column span.
    pub fn column_basis(&self) -> QMatrix {
        let mut chosen: Vec<QVector> = Vec::new();
        for j in 0..self.cols {
            let cand = self.col(j);
            if is_zero_vec(&cand) {
                continue;
            }
            let mut trial = chosen.clone();
            trial.push(cand);
            let m = QMatrix::from_columns(&trial);
            if m.rank() == trial.len() {
                chosen = trial;
            }
        }
        QMatrix::from_columns_with_dim(self.rows, &chosen)
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    /// Abs value of the maximum entry denominator cleared: returns (scale d,
    /// integer matrix d*self) — used before Hermite/Smith reduction.
    pub fn clear_denominators(&self) -> (num_bigint::BigInt, crate::normal_forms::IMatrix) {
        let d = crate::rat::lcm_denoms(self.data.iter());
        let mut m = crate::normal_forms::IMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                m.set(i, j, x.numer() * (&d / x.denom()));
            }
        }
        (d, m)
    }
}

/// Signed: nonzero sign of the first nonzero entry, used for canonical ray
/// orientations.
pub fn leading_sign(v: &[Rat]) -> i32 {
    for x in v {
        if x.is_positive() {
            return 1;
        }
        if x.is_negative() {
            return -1;
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn solve_and_kernel() {
        let m = QMatrix::from_rows(vec![qvec(&[1, 2, 3]), qvec(&[2, 4, 6])]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.ncols(), 2);
        for j in 0..2 {
            assert!(is_zero_vec(&m.mul_vec(&k.col(j))));
        }
        let sol = m.solve(&qvec(&[6, 12])).unwrap();
        assert!(is_zero_vec(&sub_vec(&m.mul_vec(&sol), &qvec(&[6, 12]))));
        assert!(m.solve(&qvec(&[1, 0])).is_none());
    }

    #[test]
    fn det_inverse() {
        let m = QMatrix::from_rows(vec![qvec(&[2, 1]), qvec(&[1, 1])]);
        assert_eq!(m.det(), rat_int(1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
        let s = QMatrix::from_rows(vec![qvec(&[1, 2]), qvec(&[2, 4])]);
        assert_eq!(s.det(), rat_int(0));
        assert!(s.inverse().is_err());
    }

    #[test]
    fn primitive_scaling() {
        assert_eq!(primitive_integer(&[rat(1, 2), rat(-3, 4)]), qvec(&[2, -3]));
        assert_eq!(primitive_integer(&qvec(&[4, -6])), qvec(&[2, -3]));
    }
}
