//! Invariant parallels x_{n+1} = k. The extactic over {1, x_{n+1}} is the
//! last component P_{n+1}; a parallel exists exactly when x_{n+1} − k
//! divides it, i.e. when k is a common root of its coefficient slices.

use super::{
    cofactor_solve, gcd_of_slices, slices_in_var, CofactorOutcome, InvariantSurface, SurfaceKind,
};
use crate::extactic::{extactic, BasisW};
use crate::field::PolyVectorField;
use crate::poly::MultiPoly;
use crate::roots::{gaussian_rational_roots, isolate_residual_real_roots, Isolated};
use crate::scalar::{rat, GaussianRational, Rat};
use crate::sphere::SphereContext;
use num_traits::{One, Signed};

#[derive(Clone, Debug)]
pub struct ExactParallel {
    pub k: GaussianRational,
    pub surface: InvariantSurface,
}

#[derive(Clone, Debug)]
pub struct ParallelReport {
    pub exact: Vec<ExactParallel>,
    /// Real irrational heights, isolated to certified rational intervals.
    pub nonexact: Vec<Isolated>,
    /// P_{n+1} ≡ 0: every parallel is invariant, the finiteness hypothesis
    /// fails.
    pub degenerate: bool,
    /// deg_{x_{n+1}}(P_{n+1}): the number of linear factors x_{n+1} − k the
    /// last component can carry.
    pub bound: u32,
    /// Number of parallels over C counted with multiplicity (degree of the
    /// slice gcd).
    pub total_with_multiplicity: u32,
}

impl ParallelReport {
    /// Exact parallels with real k strictly inside (−1, 1): the ones visible
    /// as nonempty transversal circles on the real sphere.
    pub fn real_visible(&self) -> Vec<&ExactParallel> {
        let one = Rat::one();
        self.exact
            .iter()
            .filter(|p| p.k.is_real() && p.k.re.clone().abs() < one)
            .collect()
    }

    pub fn attained(&self) -> bool {
        !self.degenerate && self.total_with_multiplicity == self.bound && self.bound > 0
    }

    fn degenerate_report() -> Self {
        ParallelReport {
            exact: Vec::new(),
            nonexact: Vec::new(),
            degenerate: true,
            bound: 0,
            total_with_multiplicity: 0,
        }
    }
}

/// Detect every invariant parallel of a tangent field.
pub fn find_parallels(x: &PolyVectorField, ctx: &SphereContext) -> ParallelReport {
    assert_eq!(x.nvars(), ctx.nvars(), "variable count mismatch");
    assert!(
        x.check_on_sphere(ctx).is_some(),
        "find_parallels needs a field tangent to the sphere"
    );
    let nvars = ctx.nvars();
    let last = nvars - 1;

    let w = BasisW::new(vec![MultiPoly::one(nvars), MultiPoly::var(nvars, last)])
        .expect("{1, x_{n+1}} is independent");
    let ext = extactic(x, &w);
    debug_assert_eq!(&ext.e, x.component(last));
    if ext.degenerate {
        return ParallelReport::degenerate_report();
    }
    let p_last = &ext.e;
    let bound = p_last.degree_in(last);

    let candidate = gcd_of_slices(&slices_in_var(p_last, last));
    let total_with_multiplicity = candidate.degree().unwrap_or(0) as u32;
    let mut exact = Vec::new();
    let mut nonexact = Vec::new();
    for (factor, mult) in candidate.square_free_decomposition() {
        let mut residual = factor.clone();
        for (k, root_mult) in gaussian_rational_roots(&factor) {
            debug_assert_eq!(root_mult, 1, "square-free factor");
            residual = residual.deflate(&k);
            let f = &MultiPoly::var(nvars, last)
                - &MultiPoly::constant(nvars, k.clone());
            let surface = match cofactor_solve(x, &f, Some(ctx)) {
                CofactorOutcome::Invariant(mut s) | CofactorOutcome::NonTransversal(mut s) => {
                    s.multiplicity = mult;
                    debug_assert_eq!(s.kind, SurfaceKind::Parallel);
                    s
                }
                CofactorOutcome::NotInvariant => {
                    unreachable!("a factor of P_{{n+1}} is always invariant")
                }
            };
            exact.push(ExactParallel { k, surface });
        }
        for mut iso in isolate_residual_real_roots(&residual, &rat(1, 1 << 24)) {
            iso.multiplicity = mult;
            nonexact.push(iso);
        }
    }
    exact.sort_by(|a, b| a.k.cmp(&b.k));
    ParallelReport {
        exact,
        nonexact,
        degenerate: false,
        bound,
        total_with_multiplicity,
    }
}
