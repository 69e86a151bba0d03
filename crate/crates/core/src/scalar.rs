//! The coefficient field: complex numbers with rational real and imaginary
//! parts (Gaussian rationals). Every computation in the crate stays in this
//! field, so no rounding ever occurs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact rational scalar. `BigRational` keeps gcd(|num|, den) = 1 and den > 0.
pub type Rat = BigRational;

/// Build a rational from small integers (test/fixture convenience).
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// A complex number a + b·i with exact rational a, b.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: Rat,
    pub im: Rat,
}

impl GaussianRational {
    pub fn new(re: Rat, im: Rat) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        GaussianRational {
            re,
            im: Rat::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat(n, 1))
    }

    /// The imaginary unit i.
    pub fn i() -> Self {
        GaussianRational {
            re: Rat::zero(),
            im: Rat::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |z|² = re² + im², an exact non-negative rational.
    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by zero GaussianRational");
        GaussianRational {
            re: &self.re / &n,
            im: -&self.im / &n,
        }
    }

    /// Floating approximation as (re, im).
    pub fn to_f64(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // Good enough for desk-scale magnitudes; exact when representable.
    let num = r.numer();
    let den = r.denom();
    let fnum = bigint_to_f64(num);
    let fden = bigint_to_f64(den);
    fnum / fden
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(if n.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rat> for GaussianRational {
    fn from(r: Rat) -> Self {
        Self::from_rat(r)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
        impl $trait<GaussianRational> for &GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self * &rhs.inv()
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}*i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}*i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{}*i", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: (i64, i64), im: (i64, i64)) -> GaussianRational {
        GaussianRational::new(rat(re.0, re.1), rat(im.0, im.1))
    }

    #[test]
    fn conjugation_is_involution() {
        let z = g((3, 4), (-2, 5));
        assert_eq!(z.conj().conj(), z);
    }

    #[test]
    fn norm_is_multiplicative() {
        let a = g((3, 1), (2, 1));
        let b = g((-1, 2), (5, 3));
        assert_eq!((&a * &b).norm_sqr(), a.norm_sqr() * b.norm_sqr());
    }

    #[test]
    fn division_round_trip() {
        let a = g((7, 3), (-1, 4));
        let b = g((2, 5), (3, 1));
        assert_eq!(&(&a / &b) * &b, a);
    }

    #[test]
    #[should_panic(expected = "division by zero")]
    fn zero_inverse_panics() {
        let _ = GaussianRational::zero().inv();
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, GaussianRational::from_int(-1));
    }
}
