//! Invariant affine hyperplanes in ambient R^N, detected over the extactic
//! polynomial of W = {1, x_1, …, x_N}.
//!
//! Directions come from the linear factors of the top-degree homogeneous
//! part (complete slope search for N = 2, random restrictions for N ≥ 3);
//! offsets come from the coefficient gcd after rewriting the pivot variable
//! in terms of the candidate level value. Divisibility only nominates:
//! every reported hyperplane is confirmed by the cofactor equation.

use super::{
    cofactor_solve, fold_ray, gcd_of_slices, normal_form_linear, slices_in_var, CofactorOutcome,
    InvariantSurface,
};
use crate::extactic::{extactic, multiplicity, BasisW};
use crate::field::PolyVectorField;
use crate::linalg;
use crate::poly::{Monomial, MultiPoly};
use crate::roots::{gaussian_rational_roots, isolate_residual_real_roots, Isolated};
use crate::scalar::{rat, GaussianRational};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A certified factor of the extactic whose offset is real but irrational:
/// direction a with a·x ≈ level inside the isolating interval. Not verified
/// as invariant (verification needs the exact offset).
#[derive(Clone, Debug)]
pub struct NonexactHyperplane {
    pub direction: MultiPoly,
    pub level: Isolated,
}

#[derive(Clone, Debug)]
pub struct HyperplaneReport {
    pub exact: Vec<InvariantSurface>,
    pub nonexact: Vec<NonexactHyperplane>,
    pub degenerate: bool,
    /// The hyperplane-count bound evaluated on this field's degrees:
    /// C(N,2)(m₁−1) + Σ m_k.
    pub bound: u32,
}

impl HyperplaneReport {
    pub fn count_with_multiplicity(&self) -> u32 {
        self.exact.iter().map(|s| s.multiplicity).sum()
    }
}

pub fn hyperplane_bound(nvars: usize, sorted_degrees: &[u32]) -> u32 {
    let m1 = sorted_degrees.first().copied().unwrap_or(0);
    let choose = (nvars * nvars.saturating_sub(1) / 2) as u32;
    let sum: u32 = sorted_degrees.iter().sum();
    choose * m1.saturating_sub(1) + sum
}

/// Detect invariant affine hyperplanes of an ambient field. Complete over
/// Q(i) for N = 2; verified-randomized for N ≥ 3 (`seed` drives the
/// restriction planes).
pub fn find_hyperplanes(x: &PolyVectorField, seed: u64) -> HyperplaneReport {
    let nvars = x.nvars();
    let dv = x.degree_vector();
    let bound = hyperplane_bound(nvars, &dv.sorted);

    let mut basis = vec![MultiPoly::one(nvars)];
    basis.extend((0..nvars).map(|i| MultiPoly::var(nvars, i)));
    let w = BasisW::new(basis).expect("{1, x_1..x_N} is independent");
    let ext = extactic(x, &w);
    if ext.degenerate {
        return HyperplaneReport {
            exact: Vec::new(),
            nonexact: Vec::new(),
            degenerate: true,
            bound,
        };
    }

    let top = top_homogeneous_part(&ext.e);
    let directions = match nvars {
        1 => vec![MultiPoly::var(1, 0)],
        2 => bivariate_directions(&top),
        _ => randomized_directions(&top, seed),
    };

    let mut exact: Vec<InvariantSurface> = Vec::new();
    let mut nonexact = Vec::new();
    for dir in directions {
        let (offsets, isolated) = offsets_for_direction(&ext.e, &dir);
        for level in offsets {
            // a·x = level  ⇔  f = a·x − level
            let f = &dir - &MultiPoly::constant(nvars, level);
            let nf = normal_form_linear(&f);
            if exact.iter().any(|s| s.f == nf) {
                continue;
            }
            if let CofactorOutcome::Invariant(mut s) = cofactor_solve(x, &nf, None) {
                s.multiplicity = multiplicity(&ext, &nf).expect("non-degenerate");
                exact.push(s);
            }
        }
        for level in isolated {
            nonexact.push(NonexactHyperplane {
                direction: dir.clone(),
                level,
            });
        }
    }
    HyperplaneReport {
        exact,
        nonexact,
        degenerate: false,
        bound,
    }
}

fn top_homogeneous_part(e: &MultiPoly) -> MultiPoly {
    let deg = e.degree().expect("nonzero");
    MultiPoly::from_terms(
        e.nvars(),
        e.terms()
            .filter(|(m, _)| m.total_degree() == deg)
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// Exact linear-factor directions of a homogeneous polynomial in 2
/// variables (arity preserved), plus the x_1-axis case.
fn bivariate_directions(top: &MultiPoly) -> Vec<MultiPoly> {
    let nvars = top.nvars();
    let mut out = Vec::new();
    if top.exact_divide(&MultiPoly::var(nvars, 0)).is_some() {
        out.push(MultiPoly::var(nvars, 0));
    }
    let g = gcd_of_slices(&fold_ray(top, 0, 1)).square_free_part();
    for (s0, _) in gaussian_rational_roots(&g) {
        // x_2 − s0·x_1
        let f = &MultiPoly::var(nvars, 1) - &MultiPoly::var(nvars, 0).scale(&s0);
        out.push(normal_form_linear(&f));
    }
    out
}

/// Las-Vegas directions for N ≥ 3: restrict the top part to random 2-planes
/// and intersect the per-level constraints, as in the meridian search but
/// over all variables. Candidates are only nominations; the offset pass and
/// the cofactor equation do the verifying.
fn randomized_directions(top: &MultiPoly, seed: u64) -> Vec<MultiPoly> {
    let nvars = top.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<MultiPoly> = Vec::new();
    for _attempt in 0..6 {
        let mut sets: Vec<Vec<Vec<GaussianRational>>> = vec![Vec::new()];
        for _level in 0..nvars - 1 {
            let Some(rows) = direction_level_constraints(top, nvars, &mut rng) else {
                sets.clear();
                break;
            };
            let mut next = Vec::new();
            for constraints in sets {
                for row in &rows {
                    let mut cs = constraints.clone();
                    cs.push(row.clone());
                    next.push(cs);
                }
            }
            sets = next;
        }
        for constraints in sets {
            let ns = linalg::null_space(&constraints);
            if ns.len() != 1 {
                continue;
            }
            let mut f = MultiPoly::zero(nvars);
            for (i, coeff) in ns[0].iter().enumerate() {
                f = &f + &MultiPoly::var(nvars, i).scale(coeff);
            }
            if f.is_zero() {
                continue;
            }
            let nf = normal_form_linear(&f);
            if !out.contains(&nf) && nf.divides(top) {
                out.push(nf);
            }
        }
    }
    out
}

fn random_pair(
    rng: &mut ChaCha8Rng,
    nvars: usize,
) -> Option<(Vec<GaussianRational>, Vec<GaussianRational>)> {
    for _ in 0..16 {
        let c: Vec<GaussianRational> = (0..nvars)
            .map(|_| GaussianRational::from_int(rng.gen_range(-5..=5)))
            .collect();
        let d: Vec<GaussianRational> = (0..nvars)
            .map(|_| GaussianRational::from_int(rng.gen_range(-5..=5)))
            .collect();
        if linalg::rank(&vec![c.clone(), d.clone()]) == 2 {
            return Some((c, d));
        }
    }
    None
}

/// One shared restriction per level: constraints a·row = 0 imposed by the
/// slope roots of the restricted top part.
fn direction_level_constraints(
    top: &MultiPoly,
    nvars: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<GaussianRational>>> {
    for _ in 0..8 {
        let (c, d) = random_pair(rng, nvars)?;
        let restricted = restrict_all_vars(top, &c, &d);
        if restricted.is_zero() {
            continue;
        }
        let mut rows = Vec::new();
        if restricted
            .exact_divide(&MultiPoly::var(nvars, 0))
            .is_some()
        {
            rows.push(d.clone());
        }
        let g = gcd_of_slices(&fold_ray(&restricted, 0, 1)).square_free_part();
        for (s0, _) in gaussian_rational_roots(&g) {
            rows.push(
                c.iter()
                    .zip(&d)
                    .map(|(ck, dk)| ck + &(dk * &s0))
                    .collect(),
            );
        }
        return Some(rows);
    }
    None
}

/// Substitute every variable x_i := c_i·u + d_i·v (slots 0 and 1 hold u, v).
fn restrict_all_vars(
    e: &MultiPoly,
    c: &[GaussianRational],
    d: &[GaussianRational],
) -> MultiPoly {
    let nvars = e.nvars();
    let u = MultiPoly::var(nvars, 0);
    let v = MultiPoly::var(nvars, 1);
    let lines: Vec<MultiPoly> = (0..nvars)
        .map(|i| &u.scale(&c[i]) + &v.scale(&d[i]))
        .collect();
    let mut acc = MultiPoly::zero(nvars);
    for (m, coeff) in e.terms() {
        let mut term = MultiPoly::constant(nvars, coeff.clone());
        for (i, line) in lines.iter().enumerate() {
            if m.0[i] > 0 {
                term = &term * &line.pow(m.0[i]);
            }
        }
        acc = &acc + &term;
    }
    acc
}

/// For a fixed direction a, rewrite the pivot variable so the slot holds the
/// level value w = a·x, then read off the offsets from the coefficient gcd:
/// (a·x − w₀) divides E exactly when w₀ is a common root.
fn offsets_for_direction(
    e: &MultiPoly,
    dir: &MultiPoly,
) -> (Vec<GaussianRational>, Vec<Isolated>) {
    let nvars = e.nvars();
    let coeffs: Vec<GaussianRational> = (0..nvars)
        .map(|i| dir.coeff(&Monomial::var(nvars, i)))
        .collect();
    let pivot = coeffs
        .iter()
        .rposition(|c| !c.is_zero())
        .expect("direction is nonzero");
    // x_pivot = (w − Σ_{k≠pivot} a_k x_k) / a_pivot, slot `pivot` reused as w.
    let inv = coeffs[pivot].inv();
    let mut repl = MultiPoly::var(nvars, pivot).scale(&inv);
    for (k, a) in coeffs.iter().enumerate() {
        if k != pivot && !a.is_zero() {
            repl = &repl - &MultiPoly::var(nvars, k).scale(&(a * &inv));
        }
    }
    let rewritten = e.substitute(pivot, &repl);
    let g = gcd_of_slices(&slices_in_var(&rewritten, pivot));
    if g.is_constant() {
        return (Vec::new(), Vec::new());
    }
    let mut exact = Vec::new();
    let mut isolated = Vec::new();
    for (factor, mult) in g.square_free_decomposition() {
        let mut residual = factor.clone();
        for (w0, _) in gaussian_rational_roots(&factor) {
            residual = residual.deflate(&w0);
            exact.push(w0);
        }
        for mut iso in isolate_residual_real_roots(&residual, &rat(1, 1 << 24)) {
            iso.multiplicity = mult;
            isolated.push(iso);
        }
    }
    (exact, isolated)
}
