//! Darboux machinery on top of cofactors: first integrals and
//! time-dependent invariants from the null space of the cofactor relation,
//! real forms for conjugate pairs, and the closed-form bound formulas.

use crate::linalg;
use crate::field::{DegreeVector, PolyVectorField};
use crate::poly::{Monomial, MultiPoly};
use crate::scalar::{GaussianRational, Rat};
use crate::sphere::SphereContext;
use num_traits::{Signed, Zero};

/// Cofactors of p invariant surfaces and q exponential factors, with the
/// mode deciding whether identities are read exactly or modulo G. Sphere
/// mode stores the canonical reduced representatives.
#[derive(Clone, Debug)]
pub struct CofactorSystem {
    surface_cofactors: Vec<MultiPoly>,
    exp_cofactors: Vec<MultiPoly>,
    sphere: Option<SphereContext>,
}

impl CofactorSystem {
    pub fn new(
        surface_cofactors: Vec<MultiPoly>,
        exp_cofactors: Vec<MultiPoly>,
        sphere: Option<SphereContext>,
    ) -> Self {
        assert!(
            !surface_cofactors.is_empty() || !exp_cofactors.is_empty(),
            "need at least one cofactor"
        );
        let reduce = |k: &MultiPoly| match &sphere {
            Some(ctx) => ctx.reduce(k).0,
            None => k.clone(),
        };
        CofactorSystem {
            surface_cofactors: surface_cofactors.iter().map(&reduce).collect(),
            exp_cofactors: exp_cofactors.iter().map(&reduce).collect(),
            sphere,
        }
    }

    pub fn surface_count(&self) -> usize {
        self.surface_cofactors.len()
    }

    pub fn exp_count(&self) -> usize {
        self.exp_cofactors.len()
    }

    pub fn is_sphere_mode(&self) -> bool {
        self.sphere.is_some()
    }

    fn all(&self) -> impl Iterator<Item = &MultiPoly> {
        self.surface_cofactors.iter().chain(self.exp_cofactors.iter())
    }
}

/// Exponents of a Darboux-type function Π f_i^{λ_i} · Π F_j^{μ_j} · e^{σt}.
/// σ = 0 gives a first integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarbouxFunction {
    pub surface_exponents: Vec<GaussianRational>,
    pub exp_exponents: Vec<GaussianRational>,
    pub sigma: Rat,
}

impl DarbouxFunction {
    pub fn is_trivial(&self) -> bool {
        self.surface_exponents.iter().all(|l| l.is_zero())
            && self.exp_exponents.iter().all(|m| m.is_zero())
    }
}

/// Basis of first integrals: all (λ, μ) with Σλ_iK_i + Σμ_jL_j = 0 (on the
/// sphere in sphere mode). Empty when only the trivial solution exists.
pub fn find_first_integral(cs: &CofactorSystem) -> Vec<DarbouxFunction> {
    let matrix = cofactor_matrix(cs, false);
    linalg::null_space(&matrix)
        .into_iter()
        .map(|v| split_solution(cs, &v, false))
        .collect()
}

/// A time-dependent invariant: a solution of Σλ_iK_i + Σμ_jL_j = −σ with
/// σ ≠ 0. Solutions are normalized like the first integrals (first nonzero
/// exponent 1) and σ is reported as that scaling determines it.
pub fn find_time_invariant(cs: &CofactorSystem) -> Option<DarbouxFunction> {
    let matrix = cofactor_matrix(cs, true);
    let ncof = cs.surface_count() + cs.exp_count();
    for v in linalg::null_space(&matrix) {
        let d = split_solution(cs, &v, true);
        if !d.sigma.is_zero() && !v[..ncof].iter().all(|c| c.is_zero()) {
            return Some(d);
        }
    }
    None
}

/// Rows: monomials of the (reduced) cofactors; columns: λ then μ, plus a
/// final σ column (hitting only the constant row) when `with_sigma`.
fn cofactor_matrix(cs: &CofactorSystem, with_sigma: bool) -> linalg::Matrix {
    let nvars = cs.all().next().unwrap().nvars();
    let mut monomials: std::collections::BTreeSet<Monomial> = Default::default();
    for k in cs.all() {
        for (m, _) in k.terms() {
            monomials.insert(m.clone());
        }
    }
    if with_sigma {
        monomials.insert(Monomial::unit(nvars));
    }
    let rows: Vec<Monomial> = monomials.into_iter().collect();
    let mut matrix = Vec::with_capacity(rows.len());
    for m in &rows {
        let mut row: Vec<GaussianRational> = cs.all().map(|k| k.coeff(m)).collect();
        if with_sigma {
            row.push(if m.total_degree() == 0 {
                GaussianRational::one()
            } else {
                GaussianRational::zero()
            });
        }
        matrix.push(row);
    }
    matrix
}

fn split_solution(cs: &CofactorSystem, v: &[GaussianRational], with_sigma: bool) -> DarbouxFunction {
    let p = cs.surface_count();
    let q = cs.exp_count();
    let sigma = if with_sigma {
        let s = &v[p + q];
        debug_assert!(s.is_real(), "sigma column is real");
        s.re.clone()
    } else {
        Rat::zero()
    };
    DarbouxFunction {
        surface_exponents: v[..p].to_vec(),
        exp_exponents: v[p..p + q].to_vec(),
        sigma,
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub pass: bool,
    /// Σλ_iK_i + Σμ_jL_j + σ, reduced mod G in sphere mode. Zero iff pass.
    pub residual: MultiPoly,
    /// When the exponents are integers with σ = 0 and no exponential
    /// factors: whether the expanded rational H satisfies X(H) = 0 exactly.
    pub rational_check: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MismatchError(pub String);

impl std::fmt::Display for MismatchError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "darboux function does not match supplied data: {}", self.0)
    }
}

impl std::error::Error for MismatchError {}

/// Check the defining identity of a Darboux function symbolically, and for
/// integer exponents with σ = 0 additionally expand H = Π f_i^{λ_i} as a
/// rational function and verify X(H) = 0 exactly.
pub fn verify_darboux(
    x: &PolyVectorField,
    d: &DarbouxFunction,
    surfaces: &[crate::surfaces::InvariantSurface],
    exp_factors: &[crate::surfaces::ExponentialFactor],
    ctx: Option<&SphereContext>,
) -> Result<VerifyReport, MismatchError> {
    if d.surface_exponents.len() != surfaces.len() {
        return Err(MismatchError(format!(
            "{} surface exponents for {} surfaces",
            d.surface_exponents.len(),
            surfaces.len()
        )));
    }
    if d.exp_exponents.len() != exp_factors.len() {
        return Err(MismatchError(format!(
            "{} exponential exponents for {} factors",
            d.exp_exponents.len(),
            exp_factors.len()
        )));
    }
    if d.is_trivial() {
        return Err(MismatchError("all exponents are zero".into()));
    }
    let nvars = x.nvars();
    let mut residual = MultiPoly::constant(nvars, GaussianRational::from_rat(d.sigma.clone()));
    for (l, s) in d.surface_exponents.iter().zip(surfaces) {
        residual = &residual + &s.cofactor.scale(l);
    }
    for (mu, f) in d.exp_exponents.iter().zip(exp_factors) {
        residual = &residual + &f.cofactor.scale(mu);
    }
    if let Some(ctx) = ctx {
        residual = ctx.reduce(&residual).0;
    }
    let pass = residual.is_zero();

    let rational_check = integer_exponent_check(x, d, surfaces, ctx);
    Ok(VerifyReport {
        pass,
        residual,
        rational_check,
    })
}

fn integer_exponent_check(
    x: &PolyVectorField,
    d: &DarbouxFunction,
    surfaces: &[crate::surfaces::InvariantSurface],
    ctx: Option<&SphereContext>,
) -> Option<bool> {
    if !d.sigma.is_zero() || !d.exp_exponents.is_empty() || ctx.is_some() {
        return None;
    }
    let mut nums = Vec::new();
    let mut dens = Vec::new();
    for (l, s) in d.surface_exponents.iter().zip(surfaces) {
        if !l.is_real() || !l.re.is_integer() {
            return None;
        }
        let e = l.re.to_integer();
        let mag: u32 = num_traits::Signed::abs(&e).try_into().ok()?;
        if e.is_positive() {
            nums.push(s.f.pow(mag));
        } else if e.is_negative() {
            dens.push(s.f.pow(mag));
        }
    }
    let nvars = x.nvars();
    let num = nums.into_iter().fold(MultiPoly::one(nvars), |a, b| &a * &b);
    let den = dens.into_iter().fold(MultiPoly::one(nvars), |a, b| &a * &b);
    // X(num/den) = 0  ⇔  X(num)·den − num·X(den) = 0
    let lhs = &(&x.lie_derivative(&num) * &den) - &(&num * &x.lie_derivative(&den));
    Some(lhs.is_zero())
}

/// Numeric-evaluation recipe for one real factor of a Darboux function.
#[derive(Clone, Debug)]
pub enum RealFactorDescription {
    /// |f|^λ for a real surface with real exponent.
    RealPower { f: MultiPoly, lambda: Rat },
    /// [ (Re f)² + (Im f)² ]^power · exp(angle_coeff · atan2(Im f, Re f)),
    /// the single-valued real combination of f^λ with its conjugate.
    ConjugatePair {
        base: MultiPoly,
        re_f: MultiPoly,
        im_f: MultiPoly,
        power: Rat,
        angle_coeff: Rat,
    },
    /// exp(μ·g/h) for a real exponential factor with real exponent.
    ExpReal { g: MultiPoly, h: MultiPoly, mu: Rat },
    /// exp(2·Re(μ·g/h)) for a conjugate pair of exponential factors.
    ExpPair {
        g: MultiPoly,
        h: MultiPoly,
        mu: GaussianRational,
    },
}

/// Real form of a conjugate pair (f, conj f) with exponents (λ, conj λ).
pub fn real_form(f: &MultiPoly, lambda: &GaussianRational) -> RealFactorDescription {
    assert!(!f.is_zero(), "zero conjugate pair");
    let re_f = f.re_part();
    let im_f = f.im_part();
    let base = &(&re_f * &re_f) + &(&im_f * &im_f);
    RealFactorDescription::ConjugatePair {
        base,
        re_f,
        im_f,
        power: lambda.re.clone(),
        angle_coeff: -(&lambda.im + &lambda.im),
    }
}

/// Real form of a conjugate pair of exponential factors exp(g/h), exponent μ.
pub fn real_form_exponential(
    g: &MultiPoly,
    h: &MultiPoly,
    mu: &GaussianRational,
) -> RealFactorDescription {
    assert!(!h.is_zero(), "zero denominator");
    RealFactorDescription::ExpPair {
        g: g.clone(),
        h: h.clone(),
        mu: mu.clone(),
    }
}

/// All nine bound formulas evaluated exactly (overflow panics; inputs are
/// desk scale).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    /// Cofactor-dependence threshold in R^n: C(n+m₁−1, m₁−1) + 1.
    pub thm1b: i128,
    /// Rational-first-integral threshold in R^n: C(n+m₁−1, m₁−1) + n.
    pub thm1d: i128,
    /// Invariant hyperplanes in R^n: C(n,2)(m₁−1) + Σ_{k≤n} m_k.
    pub thm2_total: i128,
    /// Hyperplanes through one point: C(n−1,2)(m₁−1) + Σ_{k<n} m_k + 1.
    pub thm2_point: i128,
    /// Sphere-mode dependence threshold: ((n+2m₁)/(n+m₁))·C(n+m₁, m₁) + 1.
    pub thm3b: i128,
    /// Sphere-mode rational-first-integral threshold: same base + n.
    pub thm3d: i128,
    /// Meridian bound: C(n−1,2)(m₁−1) + Σ_{i<n} m_i + 1.
    pub thm4: i128,
    /// Parallel bound formula: the degree of the declared last component.
    pub thm5: i128,
    /// Dimension of degree-≤m₁ polynomials on the sphere:
    /// C(n+1+m₁, n+1) − C(n+1+m₁−d, n+1).
    pub d_of_m: i128,
}

pub fn binomial(n: i128, k: i128) -> i128 {
    if k < 0 || k > n || n < 0 {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for j in 0..k {
        acc = acc
            .checked_mul(n - j)
            .expect("binomial overflow — bound inputs are desk scale");
        acc /= j + 1;
    }
    acc
}

/// Evaluate every bound formula for dimension `n`, degree vector `m`, and
/// hypersurface degree `d` (2 for the sphere).
pub fn bounds(n: usize, m: &DegreeVector, d: u32) -> BoundsReport {
    let n_i = n as i128;
    let m1 = m.m1() as i128;
    let sum_head: i128 = m
        .sorted
        .iter()
        .take(n.saturating_sub(1))
        .map(|&x| x as i128)
        .sum();
    let sum_n: i128 = m.sorted.iter().take(n).map(|&x| x as i128).sum();

    let thm1_base = binomial(n_i + m1 - 1, m1 - 1);
    let thm2_total = binomial(n_i, 2) * (m1 - 1).max(0) + sum_n;
    let thm2_point = binomial(n_i - 1, 2) * (m1 - 1).max(0) + sum_head + 1;
    // (n+2m)/(n+m)·C(n+m, m) = C(n+m, m) + C(n+m−1, n), an exact integer.
    let thm3_base = binomial(n_i + m1, m1) + binomial(n_i + m1 - 1, n_i);
    let thm4 = binomial(n_i - 1, 2) * (m1 - 1).max(0) + sum_head + 1;
    let thm5 = m.last_raw() as i128;
    let d_i = d as i128;
    let d_of_m = binomial(n_i + 1 + m1, n_i + 1) - binomial(n_i + 1 + m1 - d_i, n_i + 1);

    BoundsReport {
        thm1b: thm1_base + 1,
        thm1d: thm1_base + n_i,
        thm2_total,
        thm2_point,
        thm3b: thm3_base + 1,
        thm3d: thm3_base + n_i,
        thm4,
        thm5,
        d_of_m,
    }
}
