//! Truncated Laurent series: the carrier for every meromorphic value in
//! this crate. One generic implementation serves high-precision complex
//! coefficients and exact rational coefficients (the latter only for
//! expansions based at zero).

use num_traits::{One, Zero};
use rug::Float;

use crate::error::{Error, Result};
use crate::numeric::Complex;
use crate::rat::Rat;

/// Coefficient ring operations needed by the series arithmetic.
pub trait Coef: Clone + std::fmt::Debug {
    fn c_zero(&self) -> Self;
    fn c_is_zero(&self) -> bool;
    fn c_add(&self, o: &Self) -> Self;
    fn c_sub(&self, o: &Self) -> Self;
    fn c_neg(&self) -> Self;
    fn c_mul(&self, o: &Self) -> Self;
    fn c_recip(&self) -> Self;
}

impl Coef for Rat {
    fn c_zero(&self) -> Self {
        Rat::zero()
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn c_add(&self, o: &Self) -> Self {
        self + o
    }
    fn c_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn c_neg(&self) -> Self {
        -self
    }
    fn c_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn c_recip(&self) -> Self {
        self.recip()
    }
}

impl Coef for Complex {
    fn c_zero(&self) -> Self {
        Complex::zero(self.prec())
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn c_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn c_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn c_neg(&self) -> Self {
        self.neg()
    }
    fn c_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn c_recip(&self) -> Self {
        self.recip()
    }
}

/// A truncated Laurent expansion along one generic line.
///
/// `coeffs[i]` is the coefficient of t^(ord + i); the window of trusted
/// exponents is ord ..= hi() and the true order of the function is
/// guaranteed to be >= ord by construction. An empty coefficient list is
/// the identically-zero series, trusted at every exponent.
#[derive(Clone, Debug)]
pub struct Series<C: Coef> {
    pub ord: i64,
    pub coeffs: Vec<C>,
}

impl<C: Coef> Series<C> {
    pub fn zero() -> Self {
        Series {
            ord: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn is_structural_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Last trusted exponent; None means "all exponents" (zero series).
    pub fn hi(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.ord + self.coeffs.len() as i64 - 1)
        }
    }

    /// Coefficient of t^k inside the trusted window; callers dispatch the
    /// structural-zero case themselves (there is no coefficient template).
    pub fn coeff_at(&self, k: i64) -> Option<C> {
        assert!(!self.coeffs.is_empty(), "coeff_at on the zero series");
        if k < self.ord {
            return Some(self.coeffs[0].c_zero());
        }
        let hi = self.hi().unwrap();
        if k > hi {
            return None; // beyond the trusted window
        }
        Some(self.coeffs[(k - self.ord) as usize].clone())
    }

    pub fn add(&self, o: &Series<C>) -> Series<C> {
        if self.is_structural_zero() {
            return o.clone();
        }
        if o.is_structural_zero() {
            return self.clone();
        }
        let ord = self.ord.min(o.ord);
        let hi = self.hi().unwrap().min(o.hi().unwrap());
        let len = (hi - ord + 1).max(0) as usize;
        let zero = self.coeffs[0].c_zero();
        let mut coeffs = vec![zero.clone(); len];
        for (i, c) in coeffs.iter_mut().enumerate() {
            let k = ord + i as i64;
            let a = self.coeff_at(k).unwrap_or_else(|| zero.clone());
            let b = o.coeff_at(k).unwrap_or_else(|| zero.clone());
            *c = a.c_add(&b);
        }
        Series { ord, coeffs }
    }

    pub fn neg(&self) -> Series<C> {
        Series {
            ord: self.ord,
            coeffs: self.coeffs.iter().map(|c| c.c_neg()).collect(),
        }
    }

    pub fn sub(&self, o: &Series<C>) -> Series<C> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &C) -> Series<C> {
        if c.c_is_zero() {
            return Series::zero();
        }
        Series {
            ord: self.ord,
            coeffs: self.coeffs.iter().map(|x| x.c_mul(c)).collect(),
        }
    }

    pub fn mul(&self, o: &Series<C>) -> Series<C> {
        if self.is_structural_zero() || o.is_structural_zero() {
            return Series::zero();
        }
        let ord = self.ord + o.ord;
        let hi = (self.hi().unwrap() + o.ord).min(o.hi().unwrap() + self.ord);
        let len = (hi - ord + 1) as usize;
        let zero = self.coeffs[0].c_zero();
        let mut coeffs = vec![zero; len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.c_is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].c_add(&a.c_mul(b));
            }
        }
        Series { ord, coeffs }
    }

    /// Multiplicative inverse. The stored leading coefficient must be
    /// nonzero: callers construct factor series with their true order.
    pub fn inv(&self) -> Result<Series<C>> {
        if self.is_structural_zero() {
            return Err(Error::NonGenericLine("inverting the zero series".into()));
        }
        let c0 = &self.coeffs[0];
        if c0.c_is_zero() {
            return Err(Error::NonGenericLine(
                "leading series coefficient vanished".into(),
            ));
        }
        let n = self.coeffs.len();
        let inv0 = c0.c_recip();
        let mut out = vec![c0.c_zero(); n];
        out[0] = inv0.clone();
        for k in 1..n {
            // c0 * out[k] = - sum_{j=1..k} coeffs[j] * out[k-j]
            let mut acc = c0.c_zero();
            for j in 1..=k {
                acc = acc.c_add(&self.coeffs[j].c_mul(&out[k - j]));
            }
            out[k] = acc.c_neg().c_mul(&inv0);
        }
        Ok(Series {
            ord: -self.ord,
            coeffs: out,
        })
    }

    /// Drops trusted coefficients above the given exponent.
    pub fn truncate_to(&self, hi: i64) -> Series<C> {
        if self.is_structural_zero() {
            return self.clone();
        }
        let keep = (hi - self.ord + 1).max(0) as usize;
        Series {
            ord: self.ord,
            coeffs: self.coeffs[..keep.min(self.coeffs.len())].to_vec(),
        }
    }
}

/// Exact evaluation outcome at the expansion point.
#[derive(Clone, Debug)]
pub struct ExactValue {
    pub holomorphic: bool,
    pub value: Rat,
}

/// Evaluation at the expansion point for exact series: holomorphy means
/// every negative-exponent coefficient is exactly zero.
pub fn value_at_exact(s: &Series<Rat>) -> Result<ExactValue> {
    if s.is_structural_zero() {
        return Ok(ExactValue {
            holomorphic: true,
            value: Rat::zero(),
        });
    }
    if s.hi().unwrap() < 0 {
        return Err(Error::TruncationTooShallow {
            order: s.ord,
            trunc: s.hi().unwrap(),
        });
    }
    let holomorphic = (s.ord..0).all(|k| s.coeff_at(k).unwrap().is_zero());
    let value = if holomorphic {
        s.coeff_at(0).unwrap()
    } else {
        Rat::zero()
    };
    Ok(ExactValue { holomorphic, value })
}

/// Evaluation outcome for numeric series.
#[derive(Clone, Debug)]
pub struct NumericValue {
    pub holomorphic: bool,
    pub value: Complex,
    /// Factor by which the largest negative-exponent coefficient sits
    /// below the holomorphy tolerance (relative to the largest
    /// coefficient); f64::INFINITY when all are exactly zero.
    pub margin: f64,
}

/// Evaluation at the expansion point: negative-exponent coefficients whose
/// modulus is at most tol * (largest coefficient modulus) are deemed zero.
pub fn value_at_numeric(s: &Series<Complex>, tol: &Float) -> Result<NumericValue> {
    if s.is_structural_zero() {
        return Ok(NumericValue {
            holomorphic: true,
            value: Complex::zero(tol.prec()),
            margin: f64::INFINITY,
        });
    }
    let hi = s.hi().unwrap();
    if hi < 0 {
        return Err(Error::TruncationTooShallow {
            order: s.ord,
            trunc: hi,
        });
    }
    let prec = s.coeffs[0].prec();
    let mut max_all = Float::with_val(prec, 0);
    for c in &s.coeffs {
        let a = c.abs();
        if a > max_all {
            max_all = a;
        }
    }
    let mut max_neg = Float::with_val(prec, 0);
    for k in s.ord..0 {
        let a = s.coeff_at(k).unwrap().abs();
        if a > max_neg {
            max_neg = a;
        }
    }
    if max_all.is_zero() {
        return Ok(NumericValue {
            holomorphic: true,
            value: Complex::zero(prec),
            margin: f64::INFINITY,
        });
    }
    let threshold = Float::with_val(prec, &max_all * tol);
    let holomorphic = max_neg <= threshold;
    let margin = if max_neg.is_zero() {
        f64::INFINITY
    } else {
        Float::with_val(prec, &threshold / &max_neg).to_f64()
    };
    let value = s.coeff_at(0).unwrap();
    Ok(NumericValue {
        holomorphic,
        value,
        margin,
    })
}

/// Default holomorphy tolerance 2^(-prec/2): half the mantissa is reserved
/// for the cancellations in alternating sums.
pub fn default_tol(prec: u32) -> Float {
    let mut t = Float::with_val(prec, 1);
    t >>= prec / 2;
    t
}

/// First `count` Bernoulli numbers B_0..B_{count-1} with the convention
/// x/(1 - e^{-x}) = sum B_k x^k / k! (so B_1 = +1/2), computed by exact
/// series inversion.
pub fn bernoulli_numbers(count: usize) -> Vec<Rat> {
    // (1 - e^{-x})/x = sum_{k>=0} (-1)^k x^k / (k+1)!.
    let mut denom = Vec::with_capacity(count);
    let mut fact = Rat::one();
    for k in 0..count {
        fact *= Rat::from_integer(((k + 1) as i64).into());
        let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
        denom.push(sign / &fact);
    }
    let s = Series {
        ord: 0,
        coeffs: denom,
    };
    let inv = s.inv().expect("unit series");
    let mut fact = Rat::one();
    let mut out = Vec::with_capacity(count);
    for (k, c) in inv.coeffs.iter().enumerate() {
        if k > 0 {
            fact *= Rat::from_integer((k as i64).into());
        }
        out.push(c * &fact);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn s(ord: i64, cs: &[i64]) -> Series<Rat> {
        Series {
            ord,
            coeffs: cs.iter().map(|&c| rat_int(c)).collect(),
        }
    }

    #[test]
    fn window_bookkeeping() {
        let a = s(-1, &[1, 2, 3, 4]); // window [-1, 2]
        let b = s(0, &[5, 6]); // window [0, 1]
        let sum = a.add(&b);
        assert_eq!(sum.ord, -1);
        assert_eq!(sum.hi(), Some(1));
        assert_eq!(sum.coeff_at(0).unwrap(), rat_int(7));
        let prod = a.mul(&b);
        assert_eq!(prod.ord, -1);
        assert_eq!(prod.hi(), Some(0));
        assert_eq!(prod.coeff_at(-1).unwrap(), rat_int(5));
        assert_eq!(prod.coeff_at(0).unwrap(), rat_int(16));
    }

    #[test]
    fn inverse_roundtrip() {
        let a = s(2, &[3, 1, 4, 1, 5]);
        let inv = a.inv().unwrap();
        assert_eq!(inv.ord, -2);
        let prod = a.mul(&inv);
        assert_eq!(prod.coeff_at(0).unwrap(), rat_int(1));
        for k in 1..=2 {
            assert!(prod.coeff_at(k).unwrap().is_zero());
        }
    }

    #[test]
    fn zero_series_behavior() {
        let z: Series<Rat> = Series::zero();
        let a = s(0, &[1, 2]);
        assert_eq!(z.add(&a).coeffs, a.coeffs);
        assert!(z.mul(&a).is_structural_zero());
        assert!(z.inv().is_err());
        let v = value_at_exact(&z).unwrap();
        assert!(v.holomorphic);
        assert!(v.value.is_zero());
    }

    #[test]
    fn exact_value_extraction() {
        let holo = s(0, &[3, 2]);
        let v = value_at_exact(&holo).unwrap();
        assert!(v.holomorphic);
        assert_eq!(v.value, rat_int(3));
        let pole = s(-1, &[1, 1]);
        let v = value_at_exact(&pole).unwrap();
        assert!(!v.holomorphic);
        let cancelled = s(-1, &[0, 7]);
        let v = value_at_exact(&cancelled).unwrap();
        assert!(v.holomorphic);
        assert_eq!(v.value, rat_int(7));
        let shallow = s(-3, &[1, 1]);
        assert!(value_at_exact(&shallow).is_err());
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(9);
        assert_eq!(b[0], rat_int(1));
        assert_eq!(b[1], rat(1, 2));
        assert_eq!(b[2], rat(1, 6));
        assert_eq!(b[3], rat_int(0));
        assert_eq!(b[4], rat(-1, 30));
        assert_eq!(b[6], rat(1, 42));
        assert_eq!(b[8], rat(-1, 30));
    }

    #[test]
    fn numeric_value_tolerance() {
        let prec = 128;
        let tol = default_tol(prec);
        let mk = |v: f64| Complex::new(Float::with_val(prec, v), Float::with_val(prec, 0));
        let noisy = Series {
            ord: -1,
            coeffs: vec![mk(1e-38), mk(2.0), mk(1.0)],
        };
        let v = value_at_numeric(&noisy, &tol).unwrap();
        assert!(v.holomorphic);
        assert!((v.value.re.to_f64() - 2.0).abs() < 1e-12);
        assert!(v.margin > 1.0);
        let singular = Series {
            ord: -1,
            coeffs: vec![mk(0.5), mk(2.0)],
        };
        let v = value_at_numeric(&singular, &tol).unwrap();
        assert!(!v.holomorphic);
    }
}
