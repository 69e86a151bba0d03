//! Polynomial vector fields X = Σ P_i ∂/∂x_i, Lie derivatives, the tangency
//! test against the sphere, and the linear space of fields tangent to S^n.

use crate::linalg;
use crate::poly::{Monomial, MultiPoly};
use crate::scalar::{rat, GaussianRational};
use crate::sphere::SphereContext;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    components: Vec<MultiPoly>,
    nvars: usize,
}

/// Component degrees in declaration order plus the conventional non-increasing
/// ordering. Bound formulas index both: thresholds consume the sorted m_1,
/// the parallel count consumes the declared last component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeVector {
    pub raw: Vec<u32>,
    pub sorted: Vec<u32>,
}

impl DegreeVector {
    pub fn from_raw(raw: Vec<u32>) -> Self {
        let mut sorted = raw.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        DegreeVector { raw, sorted }
    }

    /// Largest component degree m_1.
    pub fn m1(&self) -> u32 {
        self.sorted.first().copied().unwrap_or(0)
    }

    /// Degree of the declared last component (deg P_{n+1}).
    pub fn last_raw(&self) -> u32 {
        self.raw.last().copied().unwrap_or(0)
    }
}

/// Proof that X is tangent to the sphere: X(G) = K·G exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangencyCertificate {
    pub cofactor: MultiPoly,
}

impl PolyVectorField {
    pub fn new(components: Vec<MultiPoly>) -> Self {
        assert!(!components.is_empty(), "a vector field needs components");
        let nvars = components[0].nvars();
        assert_eq!(
            components.len(),
            nvars,
            "component count must equal the number of variables"
        );
        for c in &components {
            assert_eq!(c.nvars(), nvars, "variable count mismatch");
        }
        PolyVectorField { components, nvars }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &MultiPoly {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    /// Component degrees; a zero component counts as degree 0.
    pub fn degree_vector(&self) -> DegreeVector {
        DegreeVector::from_raw(
            self.components
                .iter()
                .map(|c| c.degree().unwrap_or(0))
                .collect(),
        )
    }

    /// Lie derivative X(f) = Σ P_i ∂f/∂x_i.
    pub fn lie_derivative(&self, f: &MultiPoly) -> MultiPoly {
        assert_eq!(f.nvars(), self.nvars, "variable count mismatch");
        let mut acc = MultiPoly::zero(self.nvars);
        for (i, p) in self.components.iter().enumerate() {
            acc = &acc + &(p * &f.partial_derivative(i));
        }
        acc
    }

    /// Iterated Lie derivative X^j(f).
    pub fn lie_derivative_iter(&self, f: &MultiPoly, j: u32) -> MultiPoly {
        let mut acc = f.clone();
        for _ in 0..j {
            acc = self.lie_derivative(&acc);
        }
        acc
    }

    /// Tangency test: X(G) exact-divided by G. `None` when X is not a vector
    /// field on the sphere.
    pub fn check_on_sphere(&self, ctx: &SphereContext) -> Option<TangencyCertificate> {
        assert_eq!(self.nvars, ctx.nvars(), "variable count mismatch");
        let xg = self.lie_derivative(ctx.g());
        if xg.is_zero() {
            return Some(TangencyCertificate {
                cofactor: MultiPoly::zero(self.nvars),
            });
        }
        xg.exact_divide(ctx.g())
            .map(|cofactor| TangencyCertificate { cofactor })
    }
}

/// Layout of the unknown coefficient vector for the tangency system: the
/// coefficients of every component (degree-capped) followed by those of the
/// cofactor K (degree ≤ m_1 − 1).
#[derive(Clone, Debug)]
pub struct TangentFamily {
    ctx: SphereContext,
    caps: DegreeVector,
    component_monomials: Vec<Vec<Monomial>>,
    cofactor_monomials: Vec<Monomial>,
    basis: Vec<Vec<GaussianRational>>,
}

/// Exponent vectors of total degree ≤ `max_deg` in `nvars` variables, in
/// ascending canonical order. Empty when `max_deg` < 0.
pub fn monomials_up_to(nvars: usize, max_deg: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if max_deg < 0 {
        return out;
    }
    let mut current = vec![0u32; nvars];
    fn rec(current: &mut Vec<u32>, idx: usize, remaining: u32, out: &mut Vec<Monomial>) {
        if idx == current.len() {
            out.push(Monomial(current.clone()));
            return;
        }
        for e in 0..=remaining {
            current[idx] = e;
            rec(current, idx + 1, remaining - e, out);
        }
        current[idx] = 0;
    }
    rec(&mut current, 0, max_deg as u32, &mut out);
    out.sort();
    out
}

/// The linear space of vector fields of (componentwise) degree at most
/// `caps.raw` tangent to S^n, solved exactly from X(G) = K·G as a polynomial
/// identity with K's coefficients joined to the unknowns.
pub fn tangent_field_space(n: usize, caps: &DegreeVector) -> TangentFamily {
    let ctx = SphereContext::new(n);
    let nvars = ctx.nvars();
    assert_eq!(
        caps.raw.len(),
        nvars,
        "need one degree cap per component ({nvars})"
    );
    let component_monomials: Vec<Vec<Monomial>> = caps
        .raw
        .iter()
        .map(|&d| monomials_up_to(nvars, d as i64))
        .collect();
    let cofactor_monomials = monomials_up_to(nvars, caps.m1() as i64 - 1);

    // Row index: every monomial that can appear in X(G) − K·G.
    let max_row_deg = caps.m1() as i64 + 1;
    let row_monomials = monomials_up_to(nvars, max_row_deg);
    let row_index: std::collections::HashMap<&Monomial, usize> =
        row_monomials.iter().enumerate().map(|(i, m)| (m, i)).collect();

    let ncols: usize =
        component_monomials.iter().map(|v| v.len()).sum::<usize>() + cofactor_monomials.len();
    let mut matrix = vec![vec![GaussianRational::zero(); ncols]; row_monomials.len()];

    let mut col = 0;
    for (i, monos) in component_monomials.iter().enumerate() {
        // Contribution of P_i's coefficient at μ: ∂G/∂x_i · μ = 2·x_i·μ.
        for mu in monos {
            let mut shifted = mu.clone();
            shifted.0[i] += 1;
            let row = row_index[&shifted];
            matrix[row][col] = &matrix[row][col] + &GaussianRational::from_int(2);
            col += 1;
        }
    }
    for nu in &cofactor_monomials {
        // Contribution of K's coefficient at ν: −ν·G = ν − Σ_k ν·x_k².
        let row = row_index[nu];
        matrix[row][col] = &matrix[row][col] + &GaussianRational::one();
        for k in 0..nvars {
            let mut shifted = nu.clone();
            shifted.0[k] += 2;
            let row = row_index[&shifted];
            matrix[row][col] = &matrix[row][col] - &GaussianRational::one();
        }
        col += 1;
    }

    let basis = linalg::null_space(&matrix);
    TangentFamily {
        ctx,
        caps: caps.clone(),
        component_monomials,
        cofactor_monomials,
        basis,
    }
}

impl TangentFamily {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<GaussianRational>] {
        &self.basis
    }

    pub fn sphere(&self) -> &SphereContext {
        &self.ctx
    }

    pub fn caps(&self) -> &DegreeVector {
        &self.caps
    }

    /// Build the field (and its tangency cofactor) from an unknown-vector.
    pub fn field_from_vector(&self, v: &[GaussianRational]) -> (PolyVectorField, MultiPoly) {
        let nvars = self.ctx.nvars();
        let mut components = Vec::with_capacity(nvars);
        let mut idx = 0;
        for monos in &self.component_monomials {
            let mut p = MultiPoly::zero(nvars);
            for m in monos {
                p = &p + &MultiPoly::from_terms(nvars, [(m.clone(), v[idx].clone())]);
                idx += 1;
            }
            components.push(p);
        }
        let mut k = MultiPoly::zero(nvars);
        for m in &self.cofactor_monomials {
            k = &k + &MultiPoly::from_terms(nvars, [(m.clone(), v[idx].clone())]);
            idx += 1;
        }
        (PolyVectorField::new(components), k)
    }

    /// Coefficient vector of a field within this layout, with the cofactor
    /// part filled in from its tangency certificate. `None` when the field
    /// does not fit the degree caps or is not tangent.
    pub fn vector_of_field(&self, x: &PolyVectorField) -> Option<Vec<GaussianRational>> {
        if x.nvars() != self.ctx.nvars() {
            return None;
        }
        let cert = x.check_on_sphere(&self.ctx)?;
        let mut v = Vec::new();
        for (i, monos) in self.component_monomials.iter().enumerate() {
            let p = x.component(i);
            let allowed: std::collections::BTreeSet<&Monomial> = monos.iter().collect();
            for (m, _) in p.terms() {
                if !allowed.contains(m) {
                    return None;
                }
            }
            for m in monos {
                v.push(p.coeff(m));
            }
        }
        for m in &self.cofactor_monomials {
            v.push(cert.cofactor.coeff(m));
        }
        Some(v)
    }

    /// Is the field a member of the family (degree caps + tangency + span)?
    pub fn contains(&self, x: &PolyVectorField) -> bool {
        match self.vector_of_field(x) {
            Some(v) => linalg::in_span(&self.basis, &v),
            None => false,
        }
    }

    /// Deterministic random rational combination of the basis. Every sample
    /// passes `check_on_sphere` by construction.
    pub fn sample(&self, seed: u64) -> PolyVectorField {
        assert!(
            !self.basis.is_empty(),
            "tangent space is trivial, nothing to sample"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ncols = self.basis[0].len();
        let mut v = vec![GaussianRational::zero(); ncols];
        for b in &self.basis {
            let num: i64 = rng.gen_range(-9..=9);
            let den: i64 = rng.gen_range(1..=4);
            let c = GaussianRational::from_rat(rat(num, den));
            for (slot, entry) in v.iter_mut().zip(b) {
                *slot = &*slot + &(entry * &c);
            }
        }
        self.field_from_vector(&v).0
    }
}

/// Convenience wrapper matching the operation-level API: sample a random
/// tangent field of the given degree caps.
pub fn sample_on_sphere_field(n: usize, caps: &DegreeVector, seed: u64) -> PolyVectorField {
    tangent_field_space(n, caps).sample(seed)
}
