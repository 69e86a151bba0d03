//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! Representation: `BTreeMap<Monomial, GaussianRational>` with no stored zero
//! coefficients, keyed by a graded lexicographic order in which the *last*
//! variable has the highest priority. The map order makes the representation
//! canonical: two polynomials are mathematically equal iff their stored form
//! is identical. The order is also what makes division by the sphere
//! polynomial produce the canonical low-degree representative (see `sphere`).

use crate::scalar::{GaussianRational, Rat};
use num_complex::Complex64;
use num_traits::Zero;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent vector of fixed length (the number of ambient variables).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        assert!(idx < nvars, "variable index {idx} out of range ({nvars} vars)");
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise divisibility; returns the quotient monomial when every
    /// exponent of `other` fits under the corresponding one of `self`.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        debug_assert_eq!(self.0.len(), other.0.len());
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

/// Graded lex, last variable highest: compare by total degree, then by
/// exponents scanned from the last variable down.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len());
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => self.0.iter().rev().cmp(other.0.iter().rev()),
            ord => ord,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse exact polynomial. See module docs for the canonical-form invariant.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.terms
            .insert(Monomial::var(nvars, idx), GaussianRational::one());
        p
    }

    pub fn from_terms<I>(nvars: usize, it: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, GaussianRational)>,
    {
        let mut p = Self::zero(nvars);
        for (m, c) in it {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
            || (self.terms.len() == 1 && self.terms.keys().next().unwrap().total_degree() == 0)
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        if self.is_zero() {
            Some(GaussianRational::zero())
        } else if self.is_constant() {
            Some(self.terms.values().next().unwrap().clone())
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.total_degree())
    }

    /// Degree in one variable (0 for the zero polynomial).
    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0)
    }

    /// Iterate terms in ascending canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    /// Leading term under the canonical order.
    pub fn leading_term(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn map_coeffs<F>(&self, f: F) -> MultiPoly
    where
        F: Fn(&GaussianRational) -> GaussianRational,
    {
        MultiPoly::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Complex conjugation of every coefficient.
    pub fn conj(&self) -> MultiPoly {
        self.map_coeffs(|c| c.conj())
    }

    /// Real part of the coefficients, as a polynomial.
    pub fn re_part(&self) -> MultiPoly {
        self.map_coeffs(|c| GaussianRational::from_rat(c.re.clone()))
    }

    /// Imaginary part of the coefficients, as a polynomial.
    pub fn im_part(&self) -> MultiPoly {
        self.map_coeffs(|c| GaussianRational::from_rat(c.im.clone()))
    }

    pub fn has_real_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    pub fn scale(&self, c: &GaussianRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &GaussianRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (k.mul(m), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative with respect to variable `idx`.
    pub fn partial_derivative(&self, idx: usize) -> MultiPoly {
        assert!(
            idx < self.nvars,
            "variable index {idx} out of range ({} vars)",
            self.nvars
        );
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut em = m.clone();
            em.0[idx] -= 1;
            out.add_term(em, c * &GaussianRational::from_int(e as i64));
        }
        out
    }

    /// Single-divisor multivariate division: returns (q, r) with
    /// `self = q·g + r` and no term of `r` divisible by the leading monomial
    /// of `g`. Panics if `g` is zero.
    pub fn div_rem(&self, g: &MultiPoly) -> (MultiPoly, MultiPoly) {
        assert_eq!(self.nvars, g.nvars, "variable count mismatch");
        let (lt_m, lt_c) = g
            .leading_term()
            .map(|(m, c)| (m.clone(), c.clone()))
            .expect("division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.nvars);
        let mut tail = MultiPoly::zero(self.nvars);
        while let Some((m, c)) = rem.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            match m.try_div(&lt_m) {
                Some(qm) => {
                    let qc = &c / &lt_c;
                    quot.add_term(qm.clone(), qc.clone());
                    rem = &rem - &g.mul_monomial(&qm, &qc);
                }
                None => {
                    // Leading term can never be cancelled; move it out.
                    rem.terms.remove(&m);
                    tail.add_term(m, c);
                }
            }
        }
        (quot, tail)
    }

    /// Exact division: `Some(q)` with `self = q·g`, or `None` when `g` does
    /// not divide `self`. Panics if `g` is zero.
    pub fn exact_divide(&self, g: &MultiPoly) -> Option<MultiPoly> {
        assert_eq!(self.nvars, g.nvars, "variable count mismatch");
        let (lt_m, lt_c) = g
            .leading_term()
            .map(|(m, c)| (m.clone(), c.clone()))
            .expect("division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.nvars);
        while let Some((m, c)) = rem.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.try_div(&lt_m)?;
            let qc = &c / &lt_c;
            quot.add_term(qm.clone(), qc.clone());
            rem = &rem - &g.mul_monomial(&qm, &qc);
        }
        Some(quot)
    }

    pub fn divides(&self, other: &MultiPoly) -> bool {
        other.exact_divide(self).is_some()
    }

    /// Exact evaluation at a point with Gaussian-rational coordinates.
    pub fn eval_exact(&self, point: &[GaussianRational]) -> GaussianRational {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        // Power table per variable up to the needed exponent.
        let mut powers: Vec<Vec<GaussianRational>> = Vec::with_capacity(self.nvars);
        for (i, x) in point.iter().enumerate() {
            let maxe = self.degree_in(i) as usize;
            let mut col = Vec::with_capacity(maxe + 1);
            col.push(GaussianRational::one());
            for k in 1..=maxe {
                let prev = col[k - 1].clone();
                col.push(&prev * x);
            }
            powers.push(col);
        }
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Floating evaluation at a complex point.
    pub fn eval_f64(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let (re, im) = c.to_f64();
            let mut t = Complex64::new(re, im);
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute variable `idx` by the polynomial `p` (same arity).
    pub fn substitute(&self, idx: usize, p: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, p.nvars, "variable count mismatch");
        assert!(idx < self.nvars);
        let maxe = self.degree_in(idx) as usize;
        let mut powers: Vec<MultiPoly> = Vec::with_capacity(maxe + 1);
        powers.push(MultiPoly::one(self.nvars));
        for k in 1..=maxe {
            let prev = powers[k - 1].clone();
            powers.push(&prev * p);
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[idx] as usize;
            let mut rest = m.clone();
            rest.0[idx] = 0;
            out = &out + &powers[e].mul_monomial(&rest, c);
        }
        out
    }

    /// Render with the given variable names in the grammar the parser accepts.
    pub fn render(&self, vars: &[String]) -> String {
        assert_eq!(vars.len(), self.nvars, "variable name count mismatch");
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative_led = (c.re.is_zero() && c.im < Rat::zero()) || c.re < Rat::zero();
            let mag = if negative_led { -c.clone() } else { c.clone() };
            if idx == 0 {
                if negative_led {
                    out.push('-');
                }
            } else if negative_led {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&render_term(&mag, m, vars));
        }
        out
    }
}

fn render_term(c: &GaussianRational, m: &Monomial, vars: &[String]) -> String {
    let mono = render_monomial(m, vars);
    if mono.is_empty() {
        return render_coeff(c);
    }
    if c.is_one() {
        return mono;
    }
    format!("{}*{}", render_coeff(c), mono)
}

fn render_monomial(m: &Monomial, vars: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars[i].clone()),
            _ => parts.push(format!("{}^{}", vars[i], e)),
        }
    }
    parts.join("*")
}

/// Positive-led coefficients only (the caller extracts the sign).
fn render_coeff(c: &GaussianRational) -> String {
    use num_traits::One;
    if c.im.is_zero() {
        return format!("{}", c.re);
    }
    if c.re.is_zero() {
        if c.im.is_one() {
            return "i".to_string();
        }
        return format!("{}*i", c.im);
    }
    let im_part = if c.im.is_one() {
        "i".to_string()
    } else if (-c.im.clone()).is_one() {
        "-i".to_string()
    } else {
        format!("{}*i", c.im)
    };
    if im_part.starts_with('-') {
        format!("({}{})", c.re, im_part)
    } else {
        format!("({}+{})", c.re, im_part)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.render(&names))
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_poly_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
        impl $trait<MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_poly_binop!(Add, add);
forward_poly_binop!(Sub, sub);
forward_poly_binop!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.map_coeffs(|c| -c.clone())
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.map_coeffs(|c| -c.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn vars3() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    fn p(src: &str) -> MultiPoly {
        parse_poly(src, &vars3()).unwrap()
    }

    #[test]
    fn conjugate_product_is_sum_of_squares() {
        assert_eq!(p("x+i*y") * p("x-i*y"), p("x^2+y^2"));
    }

    #[test]
    fn additive_identity() {
        let f = p("x^2 - 3*y*z + 1/2");
        assert_eq!(&f + &MultiPoly::zero(3), f);
    }

    #[test]
    fn triple_product_expansion() {
        // (x+y)(x+iy)(x-iy), expanded by hand.
        let lhs = p("x+y") * p("x+i*y") * p("x-i*y");
        assert_eq!(lhs, p("x^3 + x^2*y + x*y^2 + y^3"));
    }

    #[test]
    fn partial_derivatives() {
        let g = p("x^2+y^2+z^2-1");
        assert_eq!(g.partial_derivative(2), p("2*z"));
        assert_eq!(p("x+i*y").partial_derivative(1), p("i"));
        assert_eq!(p("x^2*y^3").partial_derivative(1), p("3*x^2*y^2"));
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn derivative_index_out_of_range() {
        let _ = p("x").partial_derivative(3);
    }

    #[test]
    fn exact_division() {
        assert_eq!(p("x^2+y^2").exact_divide(&p("x+i*y")), Some(p("x-i*y")));
        assert_eq!(p("x^2+y^2").exact_divide(&p("x+y")), None);
        // -i(x+y)(x^2+y^2) / (x+iy) = -i(x+y)(x-iy)
        let f = p("-i") * p("x+y") * p("x^2+y^2");
        let expected = p("-i") * p("x+y") * p("x-i*y");
        assert_eq!(f.exact_divide(&p("x+i*y")), Some(expected));
    }

    #[test]
    #[should_panic(expected = "division by zero polynomial")]
    fn divide_by_zero_poly_panics() {
        let _ = p("x").exact_divide(&MultiPoly::zero(3));
    }

    #[test]
    #[should_panic(expected = "variable count mismatch")]
    fn arity_mismatch_panics() {
        let a = MultiPoly::var(2, 0);
        let b = MultiPoly::var(3, 0);
        let _ = &a + &b;
    }

    #[test]
    fn evaluation() {
        let one = GaussianRational::one();
        let zero = GaussianRational::zero();
        let g = p("x^2+y^2+z^2-1");
        assert!(g
            .eval_exact(&[one.clone(), zero.clone(), zero.clone()])
            .is_zero());
        assert_eq!(
            p("x+i*y").eval_exact(&[one.clone(), one.clone(), zero.clone()]),
            GaussianRational::new(crate::scalar::rat(1, 1), crate::scalar::rat(1, 1))
        );
        // P3 of the degree-(2,2,2) sphere fixture vanishes at the north pole.
        let p3 = p("1 + x^2 + y^2 - z^2");
        assert!(p3.eval_exact(&[zero.clone(), zero.clone(), one]).is_zero());
    }

    #[test]
    fn monomial_order_last_variable_highest() {
        // z^2 beats x*y and x^2 at equal total degree.
        let z2 = Monomial(vec![0, 0, 2]);
        let xy = Monomial(vec![1, 1, 0]);
        let x2 = Monomial(vec![2, 0, 0]);
        assert!(z2 > xy);
        assert!(xy > x2);
        let g = p("x^2+y^2+z^2-1");
        assert_eq!(g.leading_term().unwrap().0, &z2);
    }

    #[test]
    fn degree_additivity() {
        let f = p("x^2*z - y");
        let g = p("z^3 + x*y*z");
        assert_eq!(
            (&f * &g).degree().unwrap(),
            f.degree().unwrap() + g.degree().unwrap()
        );
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<MultiPoly>();
        assert_send_sync::<GaussianRational>();
        assert_send_sync::<crate::field::PolyVectorField>();
        assert_send_sync::<crate::sphere::SphereContext>();
        assert_send_sync::<crate::surfaces::InvariantSurface>();
    }
}
