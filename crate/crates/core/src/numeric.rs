//! High-precision floating point scalars: MPFR reals and complex pairs.

use num_bigint::BigInt;
use num_traits::Zero as _;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::rat::Rat;

pub fn rug_int(b: &BigInt) -> Integer {
    let (sign, digits) = b.to_u32_digits();
    let mut i = Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if sign == num_bigint::Sign::Minus {
        i = -i;
    }
    i
}

/// Exact rational to float at the working precision (one rounding).
pub fn float_from_rat(prec: u32, r: &Rat) -> Float {
    let n = Float::with_val(prec, rug_int(r.numer()));
    let d = Float::with_val(prec, rug_int(r.denom()));
    n / d
}

pub fn float_two_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi) * 2u32
}

/// Complex number as a pair of MPFR reals of equal precision.
#[derive(Clone, Debug)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn new(re: Float, im: Float) -> Self {
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Complex {
            re: Float::with_val(prec, 0),
            im: Float::with_val(prec, 0),
        }
    }

    pub fn one(prec: u32) -> Self {
        Complex {
            re: Float::with_val(prec, 1),
            im: Float::with_val(prec, 0),
        }
    }

    pub fn from_rat(prec: u32, r: &Rat) -> Self {
        Complex {
            re: float_from_rat(prec, r),
            im: Float::with_val(prec, 0),
        }
    }

    /// re + 2*pi*im2pi*i as a complex value (no reduction: this is a linear
    /// value, not an exponential).
    pub fn from_pair(prec: u32, re: &Rat, im2pi: &Rat) -> Self {
        let two_pi = float_two_pi(prec);
        Complex {
            re: float_from_rat(prec, re),
            im: float_from_rat(prec, im2pi) * two_pi,
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Complex) -> Complex {
        Complex {
            re: Float::with_val(self.prec(), &self.re + &o.re),
            im: Float::with_val(self.prec(), &self.im + &o.im),
        }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        Complex {
            re: Float::with_val(self.prec(), &self.re - &o.re),
            im: Float::with_val(self.prec(), &self.im - &o.im),
        }
    }

    pub fn neg(&self) -> Complex {
        Complex {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Complex { re, im }
    }

    pub fn scale(&self, f: &Float) -> Complex {
        Complex {
            re: Float::with_val(self.prec(), &self.re * f),
            im: Float::with_val(self.prec(), &self.im * f),
        }
    }

    pub fn conj(&self) -> Complex {
        Complex {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn norm_sq(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, (&self.re).pow(2)) + Float::with_val(p, (&self.im).pow(2))
    }

    pub fn abs(&self) -> Float {
        self.norm_sq().sqrt()
    }

    pub fn recip(&self) -> Complex {
        let n = self.norm_sq();
        let im = Float::with_val(self.prec(), &self.im / &n);
        Complex {
            re: Float::with_val(self.prec(), &self.re / &n),
            im: -im,
        }
    }

    pub fn div(&self, o: &Complex) -> Complex {
        self.mul(&o.recip())
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

/// e^q for rational q, at precision.
pub fn exp_rat(prec: u32, q: &Rat) -> Float {
    float_from_rat(prec, q).exp()
}

/// e^{2*pi*i*q} with q reduced modulo 1 exactly in Q first, so large
/// rational angles lose no precision and roots of unity use exact angles.
pub fn exp_2pi_i(prec: u32, q: &Rat) -> Complex {
    let frac = crate::rat::fract(q);
    let angle = float_from_rat(prec, &frac) * float_two_pi(prec);
    let (sin, cos) = angle.sin_cos(Float::with_val(prec, 0));
    Complex { re: cos, im: sin }
}

/// e^{re + 2*pi*i*im2pi} as a complex value, exact-angle reduced.
pub fn exp_pair(prec: u32, re: &Rat, im2pi: &Rat) -> Complex {
    let r = exp_rat(prec, re);
    exp_2pi_i(prec, im2pi).scale(&r)
}

/// True exactly when e^{re + 2*pi*i*im2pi} = 1.
pub fn exp_pair_is_one(re: &Rat, im2pi: &Rat) -> bool {
    use num_traits::One;
    re.is_zero() && im2pi.denom().is_one()
}
