//! Invariant meridians: hyperplanes Σ_{i≤n} a_i x_i = 0 through the
//! x_{n+1}-axis, detected as linear factors of the extactic polynomial over
//! {x_1, …, x_n}.
//!
//! On S² the search is complete over Q(i): substituting x_2 = s·x_1 turns
//! every factor x_2 − s₀x_1 into a common root s₀ of the coefficient slices,
//! and E(x_1, s x_1, x_3) = x_1·(X f)|_{x_2 = s x_1} makes divisibility
//! *equivalent* to ambient invariance, so isolated real roots count as
//! genuine meridians even when irrational. For n ≥ 3 the search is
//! Las-Vegas: random plane restrictions nominate directions, exact division
//! and the cofactor equation confirm them.
//!
//! The detectors count surfaces whose invariance identity holds ambiently
//! (sphere multiplier zero) — the objects the count bounds govern. Planes
//! invariant only modulo G do not divide E (the same substitution shows
//! E(x_1, sx_1, x_3) = x_1·h̃·G̃ ≠ 0) and are supported through the
//! candidates path, which verifies them with their multiplier.

use super::{
    cofactor_solve, fold_ray, gcd_of_slices, normal_form_linear, CofactorOutcome,
    InvariantSurface, SurfaceKind,
};
use crate::extactic::{extactic, multiplicity, BasisW, ExtacticResult};
use crate::field::PolyVectorField;
use crate::linalg;
use crate::poly::MultiPoly;
use crate::roots::{gaussian_rational_roots, isolate_residual_real_roots, Isolated};
use crate::scalar::{rat, GaussianRational};
use crate::sphere::SphereContext;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Options for the n ≥ 3 randomized search and for user-supplied candidates.
#[derive(Clone, Debug)]
pub struct MeridianSearch {
    pub candidates: Vec<MultiPoly>,
    pub seed: u64,
    pub attempts: usize,
}

impl Default for MeridianSearch {
    fn default() -> Self {
        MeridianSearch {
            candidates: Vec::new(),
            seed: 1,
            attempts: 6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeridianReport {
    pub exact: Vec<InvariantSurface>,
    /// Real irrational slopes s (meridian x_2 − s·x_1 = 0) with certified
    /// isolating intervals; n = 2 only.
    pub nonexact_real: Vec<Isolated>,
    pub degenerate: bool,
    /// The meridian-count bound evaluated on this field's degrees.
    pub bound: u32,
    /// Complete count over C with multiplicity (n = 2 only).
    pub total_with_multiplicity: Option<u32>,
}

impl MeridianReport {
    /// Number of distinct real meridians (exact real-coefficient ones plus
    /// isolated irrational slopes).
    pub fn real_count(&self) -> usize {
        self.exact.iter().filter(|s| s.f.has_real_coeffs()).count() + self.nonexact_real.len()
    }

    pub fn count_with_multiplicity(&self) -> u32 {
        self.exact.iter().map(|s| s.multiplicity).sum::<u32>()
            + self.nonexact_real.iter().map(|i| i.multiplicity).sum::<u32>()
    }

    fn degenerate_report(bound: u32) -> Self {
        MeridianReport {
            exact: Vec::new(),
            nonexact_real: Vec::new(),
            degenerate: true,
            bound,
            total_with_multiplicity: None,
        }
    }
}

/// Meridian-count bound from the sorted degree vector:
/// C(n−1, 2)(m₁−1) + Σ_{i<n} m_i + 1.
pub fn meridian_bound(n: usize, sorted_degrees: &[u32]) -> u32 {
    let m1 = sorted_degrees.first().copied().unwrap_or(0);
    let choose = if n >= 3 {
        ((n - 1) * (n - 2) / 2) as u32
    } else {
        0
    };
    let sum: u32 = sorted_degrees.iter().take(n - 1).sum();
    choose * m1.saturating_sub(1) + sum + 1
}

/// Detect invariant meridians of a tangent field.
pub fn find_meridians(
    x: &PolyVectorField,
    ctx: &SphereContext,
    search: &MeridianSearch,
) -> MeridianReport {
    assert_eq!(x.nvars(), ctx.nvars(), "variable count mismatch");
    assert!(ctx.dim() >= 2, "meridians need sphere dimension at least 2");
    assert!(
        x.check_on_sphere(ctx).is_some(),
        "find_meridians needs a field tangent to the sphere"
    );
    let n = ctx.dim();
    let nvars = ctx.nvars();
    let dv = x.degree_vector();
    let bound = meridian_bound(n, &dv.sorted);

    let w = BasisW::new((0..n).map(|i| MultiPoly::var(nvars, i)).collect())
        .expect("{x_1..x_n} is independent");
    let ext = extactic(x, &w);
    if ext.degenerate {
        return MeridianReport::degenerate_report(bound);
    }

    let mut report = if n == 2 {
        complete_search_s2(x, ctx, &ext)
    } else {
        randomized_search(x, ctx, &ext, n, search)
    };
    report.bound = bound;

    // User-supplied candidates are verified exactly in any dimension.
    for cand in &search.candidates {
        if super::classify(cand, true) != SurfaceKind::Meridian {
            continue;
        }
        let nf = normal_form_linear(cand);
        if report.exact.iter().any(|s| s.f == nf) {
            continue;
        }
        if let CofactorOutcome::Invariant(mut s) = cofactor_solve(x, &nf, Some(ctx)) {
            s.multiplicity = multiplicity(&ext, &nf).unwrap_or(1).max(1);
            report.exact.push(s);
        }
    }
    report
}

/// Complete S² search: slope gcd plus the x_1 | E case.
fn complete_search_s2(
    x: &PolyVectorField,
    ctx: &SphereContext,
    ext: &ExtacticResult,
) -> MeridianReport {
    let nvars = ctx.nvars();
    let g = gcd_of_slices(&fold_ray(&ext.e, 0, 1));
    let x1 = MultiPoly::var(nvars, 0);
    let mult_x1 = multiplicity(ext, &x1).expect("non-degenerate");

    let mut exact = Vec::new();
    let mut nonexact_real = Vec::new();
    if mult_x1 > 0 {
        exact.push(confirm_meridian(x, ctx, ext, &x1));
    }
    for (factor, mult) in g.square_free_decomposition() {
        let mut residual = factor.clone();
        for (s0, _) in gaussian_rational_roots(&factor) {
            residual = residual.deflate(&s0);
            // x_2 − s0·x_1
            let f = &MultiPoly::var(nvars, 1) - &MultiPoly::var(nvars, 0).scale(&s0);
            let surface = confirm_meridian(x, ctx, ext, &f);
            debug_assert_eq!(surface.multiplicity, mult);
            exact.push(surface);
        }
        for mut iso in isolate_residual_real_roots(&residual, &rat(1, 1 << 24)) {
            iso.multiplicity = mult;
            nonexact_real.push(iso);
        }
    }
    let total = g.degree().unwrap_or(0) as u32 + mult_x1;
    MeridianReport {
        exact,
        nonexact_real,
        degenerate: false,
        bound: 0, // caller fills in
        total_with_multiplicity: Some(total),
    }
}

fn confirm_meridian(
    x: &PolyVectorField,
    ctx: &SphereContext,
    ext: &ExtacticResult,
    f: &MultiPoly,
) -> InvariantSurface {
    let nf = normal_form_linear(f);
    match cofactor_solve(x, &nf, Some(ctx)) {
        CofactorOutcome::Invariant(mut s) | CofactorOutcome::NonTransversal(mut s) => {
            s.multiplicity = multiplicity(ext, &nf).expect("non-degenerate extactic");
            debug_assert!(s.multiplicity >= 1);
            s
        }
        CofactorOutcome::NotInvariant => {
            unreachable!("meridian factor of the S² extactic is always invariant")
        }
    }
}

/// Las-Vegas search for n ≥ 3: restrict E to random 2-planes through the
/// x_{n+1}-axis, read slope roots, accumulate one linear constraint on the
/// normal vector per level, and verify every fully-determined candidate by
/// exact division and the cofactor equation.
fn randomized_search(
    x: &PolyVectorField,
    ctx: &SphereContext,
    ext: &ExtacticResult,
    n: usize,
    search: &MeridianSearch,
) -> MeridianReport {
    let nvars = ctx.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut found: Vec<InvariantSurface> = Vec::new();

    for _ in 0..search.attempts {
        // Each constraint set is a list of rows r with a·r = 0. One shared
        // restriction plane per level keeps the expensive gcd/root work to
        // one evaluation per level.
        let mut sets: Vec<Vec<Vec<GaussianRational>>> = vec![Vec::new()];
        for _level in 0..n - 1 {
            let Some(rows) = level_constraints(&ext.e, n, nvars, &mut rng) else {
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
            let a = &ns[0];
            let mut f = MultiPoly::zero(nvars);
            for (i, coeff) in a.iter().enumerate() {
                f = &f + &MultiPoly::var(nvars, i).scale(coeff);
            }
            if f.is_zero() {
                continue;
            }
            let nf = normal_form_linear(&f);
            if found.iter().any(|s| s.f == nf) {
                continue;
            }
            if nf.divides(&ext.e) {
                if let CofactorOutcome::Invariant(mut s) = cofactor_solve(x, &nf, Some(ctx)) {
                    s.multiplicity = multiplicity(ext, &nf).expect("non-degenerate");
                    found.push(s);
                }
            }
        }
    }
    MeridianReport {
        exact: found,
        nonexact_real: Vec::new(),
        degenerate: false,
        bound: 0, // caller fills in
        total_with_multiplicity: None,
    }
}

fn random_plane(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> Option<(Vec<GaussianRational>, Vec<GaussianRational>)> {
    for _ in 0..16 {
        let c: Vec<GaussianRational> = (0..n)
            .map(|_| GaussianRational::from_int(rng.gen_range(-5..=5)))
            .collect();
        let d: Vec<GaussianRational> = (0..n)
            .map(|_| GaussianRational::from_int(rng.gen_range(-5..=5)))
            .collect();
        let independent = {
            let m = vec![c.clone(), d.clone()];
            linalg::rank(&m) == 2
        };
        if independent {
            return Some((c, d));
        }
    }
    None
}

/// One restriction step: draw a plane that does not kill E, read the slope
/// roots off, and return the linear constraints a·row = 0 they impose on a
/// meridian normal vector.
fn level_constraints(
    e: &MultiPoly,
    n: usize,
    nvars: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<GaussianRational>>> {
    for _ in 0..8 {
        let (c, d) = random_plane(rng, n)?;
        let restricted = restrict_to_plane(e, &c, &d, nvars);
        if restricted.is_zero() {
            continue;
        }
        let mut rows = Vec::new();
        if restricted
            .exact_divide(&MultiPoly::var(nvars, 0))
            .is_some()
        {
            rows.push(d.clone()); // u-case: a·d = 0
        }
        let g = gcd_of_slices(&fold_ray(&restricted, 0, 1));
        for (s0, _) in gaussian_rational_roots(&g.square_free_part()) {
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

/// Substitute x_i := c_i·u + d_i·v for i < n, keeping x_{n+1}; the result is
/// expressed in the same arity with slot 0 = u, slot 1 = v.
fn restrict_to_plane(
    e: &MultiPoly,
    c: &[GaussianRational],
    d: &[GaussianRational],
    nvars: usize,
) -> MultiPoly {
    let n = c.len();
    let u = MultiPoly::var(nvars, 0);
    let v = MultiPoly::var(nvars, 1);
    let lines: Vec<MultiPoly> = (0..n)
        .map(|i| &u.scale(&c[i]) + &v.scale(&d[i]))
        .collect();
    let mut acc = MultiPoly::zero(nvars);
    for (m, coeff) in e.terms() {
        let mut term = MultiPoly::constant(nvars, coeff.clone());
        for (i, line) in lines.iter().enumerate() {
            let e_i = m.0[i];
            if e_i > 0 {
                term = &term * &line.pow(e_i);
            }
        }
        let e_last = m.0[nvars - 1];
        if e_last > 0 {
            let mut mono = crate::poly::Monomial::unit(nvars);
            mono.0[nvars - 1] = e_last;
            term = term.mul_monomial(&mono, &GaussianRational::one());
        }
        acc = &acc + &term;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{
        complex_three_meridian_field, degenerate_meridian_field, pxyz,
        real_two_meridian_field, rotation_field,
    };

    fn s2_meridians(x: &PolyVectorField) -> MeridianReport {
        let ctx = SphereContext::new(2);
        find_meridians(x, &ctx, &MeridianSearch::default())
    }

    #[test]
    fn complex_fixture_attains_three() {
        let report = s2_meridians(&complex_three_meridian_field());
        assert!(!report.degenerate);
        assert_eq!(report.bound, 3);
        assert_eq!(report.total_with_multiplicity, Some(3));
        let fs: Vec<_> = report.exact.iter().map(|s| s.f.clone()).collect();
        assert_eq!(fs.len(), 3);
        for expected in ["x + i*y", "x - i*y", "x + y"] {
            assert!(fs.contains(&pxyz(expected)), "missing {expected}");
        }
        for s in &report.exact {
            assert_eq!(s.multiplicity, 1);
            assert_eq!(s.kind, SurfaceKind::Meridian);
        }
        assert_eq!(report.real_count(), 1); // only x + y is real
    }

    #[test]
    fn rotation_has_two_complex_meridians() {
        let report = s2_meridians(&rotation_field());
        assert_eq!(report.exact.len(), 2);
        assert_eq!(report.real_count(), 0);
        let fs: Vec<_> = report.exact.iter().map(|s| s.f.clone()).collect();
        assert!(fs.contains(&pxyz("x + i*y")));
        assert!(fs.contains(&pxyz("x - i*y")));
    }

    #[test]
    fn real_fixture_attains_two_real() {
        let report = s2_meridians(&real_two_meridian_field());
        assert_eq!(report.real_count(), 2);
        let fs: Vec<_> = report.exact.iter().map(|s| s.f.clone()).collect();
        assert!(fs.contains(&pxyz("x")));
        assert!(fs.contains(&pxyz("y")));
    }

    #[test]
    fn degenerate_flagged() {
        let report = s2_meridians(&degenerate_meridian_field());
        assert!(report.degenerate);
    }

    #[test]
    fn irrational_slopes_are_isolated() {
        // Plant E with factor (x2^2 - 2 x1^2): slopes ±sqrt(2). Build the
        // field directly: P1 = x·z, P2 = ... easier to test the slice
        // machinery through a constructed extactic.
        let e = pxyz("(y^2 - 2*x^2) * z");
        let g = gcd_of_slices(&fold_ray(&e, 0, 1));
        assert_eq!(g.degree(), Some(2));
        let iso = isolate_residual_real_roots(&g, &rat(1, 1 << 24));
        assert_eq!(iso.len(), 2);
        assert!((iso[1].midpoint_f64() - std::f64::consts::SQRT_2).abs() < 1e-5);
    }

    #[test]
    fn s3_randomized_search_finds_planted_meridians() {
        // Diagonal tangent field on S³: P_i = −(1 + c_i)·x_i·x4 for
        // c = (2,3,4) and P4 = 1 + 2x1² + 3x2² + 4x3² − x4². Tangent with
        // K = −2x4; the only invariant meridians are the eigenplane
        // directions x1 = 0, x2 = 0, x3 = 0.
        let vars: Vec<String> = vec!["x1".into(), "x2".into(), "x3".into(), "x4".into()];
        let p = |s: &str| crate::parse::parse_poly(s, &vars).unwrap();
        let x = PolyVectorField::new(vec![
            p("-3*x1*x4"),
            p("-4*x2*x4"),
            p("-5*x3*x4"),
            p("1 + 2*x1^2 + 3*x2^2 + 4*x3^2 - x4^2"),
        ]);
        let ctx = SphereContext::new(3);
        assert_eq!(
            x.check_on_sphere(&ctx).unwrap().cofactor,
            p("-2*x4")
        );
        let report = find_meridians(&x, &ctx, &MeridianSearch::default());
        assert!(!report.degenerate);
        let fs: Vec<_> = report.exact.iter().map(|s| s.f.clone()).collect();
        for want in ["x1", "x2", "x3"] {
            assert!(fs.contains(&p(want)), "missing {want} in {fs:?}");
        }
        let cofs: Vec<_> = report.exact.iter().map(|s| s.cofactor.clone()).collect();
        for want in ["-3*x4", "-4*x4", "-5*x4"] {
            assert!(cofs.contains(&p(want)), "missing cofactor {want}");
        }
        assert!(report.count_with_multiplicity() <= report.bound);
    }

    #[test]
    fn candidate_verification_in_any_dimension() {
        let ctx = SphereContext::new(2);
        let x = complex_three_meridian_field();
        let search = MeridianSearch {
            candidates: vec![pxyz("x + y"), pxyz("x - y")],
            ..Default::default()
        };
        let report = find_meridians(&x, &ctx, &search);
        // x+y found twice (search + candidate) must not duplicate; x−y is
        // not invariant and must not appear.
        let count = report.exact.iter().filter(|s| s.f == pxyz("x + y")).count();
        assert_eq!(count, 1);
        assert!(!report.exact.iter().any(|s| s.f == pxyz("x - y")));
    }
}
