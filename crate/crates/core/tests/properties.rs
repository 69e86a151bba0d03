//! Property tests for the exact kernel: ring axioms and canonical-form
//! uniqueness, reduction modulo the sphere, division round trips, the
//! Leibniz rule, degree bounds, extactic basis equivariance, and the parser
//! round trip.

use dkit_core::extactic::{det_bareiss, extactic, BasisW};
use dkit_core::field::PolyVectorField;
use dkit_core::parse::parse_poly;
use dkit_core::poly::{Monomial, MultiPoly};
use dkit_core::scalar::{rat, GaussianRational};
use dkit_core::sphere::SphereContext;
use proptest::prelude::*;

const NVARS: usize = 3;

fn coeff_strategy() -> impl Strategy<Value = GaussianRational> {
    (
        -9i64..=9,
        1i64..=4,
        prop_oneof![Just(0i64), -9i64..=9],
        1i64..=4,
    )
        .prop_map(|(rn, rd, im_n, im_d)| GaussianRational::new(rat(rn, rd), rat(im_n, im_d)))
}

fn monomial_strategy() -> impl Strategy<Value = Monomial> {
    proptest::collection::vec(0u32..=3, NVARS).prop_map(Monomial)
}

fn poly_strategy() -> impl Strategy<Value = MultiPoly> {
    proptest::collection::vec((monomial_strategy(), coeff_strategy()), 0..6)
        .prop_map(|terms| MultiPoly::from_terms(NVARS, terms))
}

fn nonzero_poly() -> impl Strategy<Value = MultiPoly> {
    poly_strategy().prop_filter("nonzero", |p| !p.is_zero())
}

fn field_strategy() -> impl Strategy<Value = PolyVectorField> {
    proptest::collection::vec(poly_strategy(), NVARS..=NVARS)
        .prop_map(PolyVectorField::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms_and_canonical_uniqueness(
        f in poly_strategy(),
        g in poly_strategy(),
        h in poly_strategy(),
    ) {
        prop_assert_eq!(&f + &g, &g + &f);
        prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&f - &f, MultiPoly::zero(NVARS));
    }

    #[test]
    fn degree_additivity(f in nonzero_poly(), g in nonzero_poly()) {
        let prod = &f * &g;
        prop_assert_eq!(
            prod.degree().unwrap(),
            f.degree().unwrap() + g.degree().unwrap()
        );
    }

    #[test]
    fn conjugation_is_a_ring_morphism(f in poly_strategy(), g in poly_strategy()) {
        prop_assert_eq!((&f * &g).conj(), &f.conj() * &g.conj());
        prop_assert_eq!((&f + &g).conj(), &f.conj() + &g.conj());
        let real = f.re_part();
        prop_assert_eq!(real.conj(), real);
    }

    #[test]
    fn sphere_reduction_idempotent_and_exact(f in poly_strategy()) {
        let ctx = SphereContext::new(NVARS - 1);
        let (r, h) = ctx.reduce(&f);
        prop_assert!(r.degree_in(NVARS - 1) <= 1);
        prop_assert_eq!(ctx.reduce(&r).0, r.clone());
        prop_assert_eq!(&f - &r, &h * ctx.g());
        // the difference is exactly divisible by G
        prop_assert!((&f - &r).exact_divide(ctx.g()).is_some());
    }

    #[test]
    fn exact_divide_round_trip(f in poly_strategy(), g in nonzero_poly()) {
        let prod = &f * &g;
        let q = prod.exact_divide(&g);
        prop_assert_eq!(q.clone(), Some(f.clone()));
        if let Some(q) = q {
            prop_assert_eq!(&q * &g, prod);
        }
    }

    #[test]
    fn leibniz_rule(x in field_strategy(), f in poly_strategy(), g in poly_strategy()) {
        let lhs = x.lie_derivative(&(&f * &g));
        let rhs = &(&f * &x.lie_derivative(&g)) + &(&g * &x.lie_derivative(&f));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lie_derivative_degree_bound(x in field_strategy(), f in nonzero_poly()) {
        let m1 = x.degree_vector().m1();
        let xf = x.lie_derivative(&f);
        if let (Some(df), Some(dxf)) = (f.degree(), xf.degree()) {
            prop_assert!(dxf as i64 <= df as i64 + m1 as i64 - 1);
        }
    }

    #[test]
    fn parser_round_trip(p in poly_strategy()) {
        let vars: Vec<String> = vec!["x".into(), "y".into(), "z".into()];
        let rendered = p.render(&vars);
        let reparsed = parse_poly(&rendered, &vars).unwrap();
        prop_assert_eq!(&reparsed, &p);
        prop_assert_eq!(reparsed.render(&vars), rendered);
    }

    #[test]
    fn extactic_basis_change_equivariance(
        x in field_strategy(),
        m00 in -3i64..=3, m01 in -3i64..=3, m10 in -3i64..=3, m11 in -3i64..=3,
    ) {
        let det = m00 * m11 - m01 * m10;
        prop_assume!(det != 0);
        let v1 = MultiPoly::var(NVARS, 0);
        let v2 = MultiPoly::var(NVARS, 1);
        let w = BasisW::new(vec![v1.clone(), v2.clone()]).unwrap();
        let c = |k: i64| GaussianRational::from_int(k);
        let w1 = &v1.scale(&c(m00)) + &v2.scale(&c(m01));
        let w2 = &v1.scale(&c(m10)) + &v2.scale(&c(m11));
        let changed = BasisW::new(vec![w1, w2]).unwrap();
        let e = extactic(&x, &w);
        let e_changed = extactic(&x, &changed);
        prop_assert_eq!(e_changed.e, e.e.scale(&c(det)));
    }
}

#[test]
fn bareiss_pivoting_handles_zero_pivots() {
    let vars: Vec<String> = vec!["x".into(), "y".into(), "z".into()];
    let p = |s: &str| parse_poly(s, &vars).unwrap();
    // leading entry zero forces a swap; determinant is -(x·x) = -x^2... the
    // matrix [[0, x], [x, y]] has determinant −x².
    let m = vec![vec![p("0"), p("x")], vec![p("x"), p("y")]];
    assert_eq!(det_bareiss(m), p("-x^2"));
}
