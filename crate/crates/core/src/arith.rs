//! Integer and Gaussian-integer arithmetic supporting rational root
//! enumeration: Miller-Rabin, Pollard-Brent rho, Gaussian prime
//! factorization above each rational prime, and divisor enumeration.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Deterministic Miller-Rabin for the bases below (valid far past any norm
/// this crate will ever see; probabilistically safe beyond).
pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let bp = BigUint::from(p);
        if *n == bp {
            return true;
        }
        if (n % bp).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard-Brent rho; `n` must be odd composite and > 1.
fn pollard_rho(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::from(1u32);
    loop {
        let mut x = BigUint::from(2u32);
        let mut y = BigUint::from(2u32);
        let mut d = BigUint::one();
        let f = |v: &BigUint| (v * v + &c) % n;
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if !d.is_one() && d != *n {
            return d;
        }
        c += &one;
    }
}

/// Prime factorization of a positive integer, (prime, exponent) pairs in
/// increasing prime order.
pub fn factor(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out: std::collections::BTreeMap<BigUint, u32> = Default::default();
    let mut stack = vec![n.clone()];
    while let Some(mut m) = stack.pop() {
        if m.is_one() || m.is_zero() {
            continue;
        }
        // Trial division first: norms are usually smooth.
        for p in 2u64..=7919 {
            let bp = BigUint::from(p);
            if &bp * &bp > m {
                break;
            }
            while (&m % &bp).is_zero() {
                *out.entry(bp.clone()).or_insert(0) += 1;
                m /= &bp;
            }
        }
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            *out.entry(m).or_insert(0) += 1;
        } else {
            let d = pollard_rho(&m);
            stack.push(m / &d);
            stack.push(d);
        }
    }
    out.into_iter().collect()
}

/// Gaussian integer a + b·i.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: BigInt, im: BigInt) -> Self {
        GaussianInt { re, im }
    }

    pub fn from_i64(re: i64, im: i64) -> Self {
        GaussianInt::new(BigInt::from(re), BigInt::from(im))
    }

    pub fn zero() -> Self {
        GaussianInt::from_i64(0, 0)
    }

    pub fn one() -> Self {
        GaussianInt::from_i64(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == BigUint::one()
    }

    pub fn norm(&self) -> BigUint {
        (&self.re * &self.re + &self.im * &self.im)
            .to_biguint()
            .unwrap()
    }

    pub fn conj(&self) -> Self {
        GaussianInt::new(self.re.clone(), -self.im.clone())
    }

    pub fn mul(&self, o: &GaussianInt) -> GaussianInt {
        GaussianInt::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn sub(&self, o: &GaussianInt) -> GaussianInt {
        GaussianInt::new(&self.re - &o.re, &self.im - &o.im)
    }

    /// Euclidean division with rounding to the nearest Gaussian integer.
    pub fn div_round(&self, d: &GaussianInt) -> GaussianInt {
        let n = BigInt::from(d.norm());
        let prod = self.mul(&d.conj());
        GaussianInt::new(round_div(&prod.re, &n), round_div(&prod.im, &n))
    }

    pub fn rem(&self, d: &GaussianInt) -> GaussianInt {
        let q = self.div_round(d);
        self.sub(&d.mul(&q))
    }

    pub fn gcd(&self, o: &GaussianInt) -> GaussianInt {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.canonical_associate()
    }

    /// The associate (unit multiple) with re > 0, im >= 0; zero stays zero.
    pub fn canonical_associate(&self) -> GaussianInt {
        if self.is_zero() {
            return self.clone();
        }
        let mut z = self.clone();
        let i = GaussianInt::from_i64(0, 1);
        for _ in 0..4 {
            if z.re.is_positive() && !z.im.is_negative() {
                return z;
            }
            z = z.mul(&i);
        }
        unreachable!("some associate has re>0, im>=0");
    }

    /// Exact division when `d | self` in Z[i].
    pub fn exact_div(&self, d: &GaussianInt) -> Option<GaussianInt> {
        let q = self.div_round(d);
        if self.sub(&d.mul(&q)).is_zero() {
            Some(q)
        } else {
            None
        }
    }
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // round(a/b) = floor((2a + b) / 2b) for b > 0
    debug_assert!(b.is_positive());
    let num = a * BigInt::from(2) + b;
    let den = b * BigInt::from(2);
    num.div_floor(&den)
}

/// Gaussian prime factorization, up to units: returns (prime, exponent)
/// pairs whose product times a unit equals `z`.
pub fn factor_gaussian(z: &GaussianInt) -> Vec<(GaussianInt, u32)> {
    assert!(!z.is_zero(), "cannot factor zero");
    let mut out: Vec<(GaussianInt, u32)> = Vec::new();
    let mut rest = z.clone();
    for (p, _) in factor(&z.norm()) {
        for prime in gaussian_primes_above(&p) {
            let mut e = 0;
            while let Some(q) = rest.exact_div(&prime) {
                rest = q;
                e += 1;
            }
            if e > 0 {
                out.push((prime, e));
            }
        }
    }
    debug_assert!(rest.is_unit());
    out
}

/// The Gaussian primes dividing the rational prime p (canonical associates).
fn gaussian_primes_above(p: &BigUint) -> Vec<GaussianInt> {
    let two = BigUint::from(2u32);
    let four = BigUint::from(4u32);
    if *p == two {
        return vec![GaussianInt::from_i64(1, 1)];
    }
    if p % &four == BigUint::from(3u32) {
        return vec![GaussianInt::new(BigInt::from(p.clone()), BigInt::zero())];
    }
    // p ≡ 1 (mod 4): find x with x² ≡ −1, then split via gcd(p, x + i).
    let x = sqrt_of_minus_one(p);
    let pg = GaussianInt::new(BigInt::from(p.clone()), BigInt::zero());
    let prime = pg.gcd(&GaussianInt::new(BigInt::from(x), BigInt::one()));
    debug_assert_eq!(prime.norm(), *p);
    let conj = prime.conj().canonical_associate();
    vec![prime, conj]
}

fn sqrt_of_minus_one(p: &BigUint) -> BigUint {
    // c^((p-1)/4) for a quadratic non-residue c.
    let exp = (p - 1u32) >> 2;
    let half = (p - 1u32) >> 1;
    let pm1 = p - 1u32;
    let mut c = BigUint::from(2u32);
    loop {
        if c.modpow(&half, p) == pm1 {
            let x = c.modpow(&exp, p);
            debug_assert_eq!((&x * &x) % p, pm1);
            return x;
        }
        c += 1u32;
    }
}

/// All divisors of `z` up to units (canonical associates). The count is the
/// product of (e_i + 1); callers keep inputs desk-scale.
pub fn gaussian_divisors(z: &GaussianInt) -> Vec<GaussianInt> {
    let factors = factor_gaussian(z);
    let mut divisors = vec![GaussianInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divisors.len() * (e as usize + 1));
        for d in &divisors {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..e {
                acc = acc.mul(&p);
                next.push(acc.clone());
            }
        }
        divisors = next;
    }
    divisors.into_iter().map(|d| d.canonical_associate()).collect()
}
