//! Univariate machinery over Q(i): gcd, Yun square-free decomposition,
//! rational-root search via norm-based Gaussian divisor enumeration, and
//! certified real-root isolation (Sturm counts, rational bisection).

use crate::arith::{gaussian_divisors, GaussianInt};
use crate::scalar::{GaussianRational, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense univariate polynomial, `coeffs[k]` multiplying t^k, trailing zeros
/// trimmed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    pub coeffs: Vec<GaussianRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, t: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t) + c;
        }
        acc
    }

    pub fn eval_rat(&self, t: &Rat) -> GaussianRational {
        self.eval(&GaussianRational::from_rat(t.clone()))
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * &GaussianRational::from_int(k as i64 + 1))
                .collect(),
        )
    }

    pub fn scale(&self, c: &GaussianRational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            Some(l) if !l.is_zero() => self.scale(&l.inv()),
            _ => self.clone(),
        }
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = vec![GaussianRational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] = c.clone();
        }
        for (k, c) in o.coeffs.iter().enumerate() {
            out[k] = &out[k] - c;
        }
        UniPoly::new(out)
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut out =
            vec![GaussianRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UniPoly::new(out)
    }

    /// Euclidean division: (quotient, remainder).
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dl = d.leading().expect("division by zero polynomial").clone();
        let dd = d.degree().unwrap();
        let mut rem = self.clone();
        let mut quot = vec![
            GaussianRational::zero();
            self.coeffs.len().saturating_sub(d.coeffs.len()) + 1
        ];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = &rem.coeffs[rd] / &dl;
            let shift = rd - dd;
            quot[shift] = c.clone();
            let mut sub = vec![GaussianRational::zero(); shift + d.coeffs.len()];
            for (k, a) in d.coeffs.iter().enumerate() {
                sub[shift + k] = a * &c;
            }
            rem = rem.sub(&UniPoly::new(sub));
        }
        (UniPoly::new(quot), rem)
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic(); // normalization keeps coefficient growth down
        }
        a.monic()
    }

    pub fn square_free_part(&self) -> UniPoly {
        let d = self.derivative();
        if d.is_zero() {
            return self.monic();
        }
        let g = self.gcd(&d);
        if g.is_constant() {
            return self.monic();
        }
        self.div_rem(&g).0.monic()
    }

    /// Yun's algorithm: returns (factor, multiplicity) with the factors
    /// square-free, pairwise coprime, and Π factor^mult = monic(self).
    pub fn square_free_decomposition(&self) -> Vec<(UniPoly, u32)> {
        let f = self.monic();
        if f.is_constant() {
            return Vec::new();
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        if a0.is_constant() {
            return vec![(f, 1)];
        }
        let mut out = Vec::new();
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut i = 1u32;
        loop {
            let d = c.sub(&b.derivative());
            if d.is_zero() {
                if b.degree().unwrap_or(0) > 0 {
                    out.push((b.monic(), i));
                }
                return out;
            }
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.monic(), i));
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            i += 1;
        }
    }

    /// Divide out (t - root); panics when root is not actually a root.
    pub fn deflate(&self, root: &GaussianRational) -> UniPoly {
        let lin = UniPoly::new(vec![-root.clone(), GaussianRational::one()]);
        let (q, r) = self.div_rem(&lin);
        assert!(r.is_zero(), "deflation by a non-root");
        q
    }

    /// Real coefficients?
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_real())
    }

    pub fn re_part(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .map(|c| GaussianRational::from_rat(c.re.clone()))
                .collect(),
        )
    }

    pub fn im_part(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .map(|c| GaussianRational::from_rat(c.im.clone()))
                .collect(),
        )
    }
}

/// All roots of `u` lying in Q(i), with multiplicities. Exact and complete:
/// clears denominators, then enumerates Gaussian divisor candidates p/q with
/// p | trailing, q | leading.
pub fn gaussian_rational_roots(u: &UniPoly) -> Vec<(GaussianRational, u32)> {
    assert!(!u.is_zero(), "root finding on the zero polynomial");
    let mut out: Vec<(GaussianRational, u32)> = Vec::new();
    let mut work = u.clone();

    // Pull out roots at 0 first.
    let mut zero_mult = 0u32;
    while !work.is_zero() && work.coeffs.first().is_some_and(|c| c.is_zero()) {
        work = UniPoly::new(work.coeffs[1..].to_vec());
        zero_mult += 1;
    }
    if zero_mult > 0 {
        out.push((GaussianRational::zero(), zero_mult));
    }
    if work.is_constant() {
        return out;
    }

    let zi = integerize(&work);
    let trailing = zi.first().unwrap().clone();
    let leading = zi.last().unwrap().clone();
    debug_assert!(!trailing.is_zero() && !leading.is_zero());

    let units = [
        GaussianRational::one(),
        GaussianRational::i(),
        -GaussianRational::one(),
        -GaussianRational::i(),
    ];
    // Cheap floating prefilter: exact evaluation of big-coefficient
    // candidates is the bottleneck, so only candidates that already look
    // like roots in f64 (relative to the evaluation scale) are confirmed
    // exactly. A true root always passes the filter.
    let approx: Vec<num_complex::Complex64> = work
        .coeffs
        .iter()
        .map(|c| {
            let (re, im) = c.to_f64();
            num_complex::Complex64::new(re, im)
        })
        .collect();
    let plausible = |cand: &GaussianRational| -> bool {
        let (re, im) = cand.to_f64();
        let z = num_complex::Complex64::new(re, im);
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        let mut scale = 0.0f64;
        let mut zp = num_complex::Complex64::new(1.0, 0.0);
        for c in &approx {
            acc += c * zp;
            scale += c.norm() * zp.norm();
            zp *= z;
        }
        if !acc.is_finite() || !scale.is_finite() {
            return true; // out of f64 range, fall through to exact check
        }
        acc.norm() <= 1e-8 * scale.max(1.0)
    };
    let mut seen = std::collections::BTreeSet::new();
    for p in gaussian_divisors(&trailing) {
        for q in gaussian_divisors(&leading) {
            let base = gint_to_grat(&p) / gint_to_grat(&q);
            for unit in &units {
                let cand = &base * unit;
                if !seen.insert(cand.clone()) {
                    continue;
                }
                if !plausible(&cand) {
                    continue;
                }
                if work.eval(&cand).is_zero() {
                    let mut mult = 0u32;
                    while work.eval(&cand).is_zero() {
                        work = work.deflate(&cand);
                        mult += 1;
                        if work.is_constant() {
                            break;
                        }
                    }
                    out.push((cand, mult));
                    if work.is_constant() {
                        out.sort_by(|a, b| a.0.cmp(&b.0));
                        return out;
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Scale to Gaussian-integer coefficients with content 1.
fn integerize(u: &UniPoly) -> Vec<GaussianInt> {
    let mut denom = BigInt::one();
    for c in &u.coeffs {
        denom = denom.lcm(c.re.denom());
        denom = denom.lcm(c.im.denom());
    }
    let d = Rat::from(denom);
    let mut ints: Vec<GaussianInt> = u
        .coeffs
        .iter()
        .map(|c| {
            let re = &c.re * &d;
            let im = &c.im * &d;
            debug_assert!(re.is_integer() && im.is_integer());
            GaussianInt::new(re.to_integer(), im.to_integer())
        })
        .collect();
    // Divide by the Gaussian-integer content.
    let mut content = GaussianInt::zero();
    for z in &ints {
        if !z.is_zero() {
            content = if content.is_zero() {
                z.canonical_associate()
            } else {
                content.gcd(z)
            };
        }
    }
    if !content.is_zero() && !content.is_unit() {
        for z in ints.iter_mut() {
            *z = z.exact_div(&content).unwrap();
        }
    }
    ints
}

fn gint_to_grat(z: &GaussianInt) -> GaussianRational {
    GaussianRational::new(Rat::from(z.re.clone()), Rat::from(z.im.clone()))
}

/// An isolating interval (lo, hi) with exact rational endpoints containing
/// exactly one real root of the polynomial it was produced from.
#[derive(Clone, Debug, PartialEq)]
pub struct Isolated {
    pub lo: Rat,
    pub hi: Rat,
    pub multiplicity: u32,
}

impl Isolated {
    pub fn midpoint_f64(&self) -> f64 {
        crate::scalar::rat_to_f64(&((&self.lo + &self.hi) / Rat::from(BigInt::from(2))))
    }
}

/// Sturm chain of a real square-free polynomial.
fn sturm_chain(u: &UniPoly) -> Vec<UniPoly> {
    let mut chain = vec![u.clone(), u.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            return chain;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        if r.is_zero() {
            return chain;
        }
        chain.push(r.scale(&GaussianRational::from_int(-1)).monic());
    }
}

fn sign_variations(chain: &[UniPoly], t: &Rat) -> usize {
    let mut count = 0;
    let mut last: Option<bool> = None; // sign as is_positive
    for p in chain {
        let v = p.eval_rat(t);
        debug_assert!(v.is_real());
        if v.re.is_zero() {
            continue;
        }
        let pos = v.re.is_positive();
        if let Some(prev) = last {
            if prev != pos {
                count += 1;
            }
        }
        last = Some(pos);
    }
    count
}

/// Number of real roots of a real square-free polynomial in (lo, hi].
fn roots_in(chain: &[UniPoly], lo: &Rat, hi: &Rat) -> usize {
    sign_variations(chain, lo) - sign_variations(chain, hi)
}

/// Isolate the real roots of a real-coefficient square-free polynomial with
/// no rational roots, refining each interval below `width`. The Sturm counts
/// certify that each returned interval holds exactly one root.
pub fn isolate_real_roots(u: &UniPoly, width: &Rat) -> Vec<Isolated> {
    assert!(u.is_real(), "real-root isolation needs real coefficients");
    if u.is_constant() {
        return Vec::new();
    }
    let chain = sturm_chain(u);
    // Cauchy bound: 1 + max |a_k| / |a_d|
    let lead = u.leading().unwrap().re.clone().abs();
    let mut maxratio = Rat::zero();
    for c in &u.coeffs[..u.coeffs.len() - 1] {
        let r = c.re.clone().abs() / lead.clone();
        if r > maxratio {
            maxratio = r;
        }
    }
    let bound = maxratio + Rat::one();
    let mut stack = vec![(-bound.clone(), bound)];
    let mut found = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let count = roots_in(&chain, &lo, &hi);
        if count == 0 {
            continue;
        }
        let mid = (&lo + &hi) / Rat::from(BigInt::from(2));
        // Midpoints are rational; rational roots were already deflated out.
        debug_assert!(!u.eval_rat(&mid).is_zero(), "missed rational root");
        if count == 1 && (&hi - &lo) < *width {
            found.push(Isolated {
                lo,
                hi,
                multiplicity: 1,
            });
            continue;
        }
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    found.sort_by(|a, b| a.lo.cmp(&b.lo));
    found
}

/// Real roots (exactly, then isolated) of an arbitrary Q(i)-coefficient
/// polynomial after its Q(i)-rational roots have been removed: for complex
/// coefficients a real root must kill both the real and imaginary parts, so
/// isolation runs on their gcd.
pub fn isolate_residual_real_roots(residual: &UniPoly, width: &Rat) -> Vec<Isolated> {
    if residual.is_constant() {
        return Vec::new();
    }
    let real_poly = if residual.is_real() {
        residual.monic()
    } else {
        let g = residual.re_part().gcd(&residual.im_part());
        if g.is_constant() {
            return Vec::new();
        }
        g
    };
    isolate_real_roots(&real_poly.square_free_part(), width)
}
