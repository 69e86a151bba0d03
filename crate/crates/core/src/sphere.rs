//! The unit sphere S^n = {G = 0} with G = x_1² + … + x_{n+1}² − 1, and the
//! canonical reduction modulo G.
//!
//! Two polynomials are identified on the sphere when they differ by a
//! multiple of G. Under the crate's monomial order the leading monomial of G
//! is x_{n+1}², so single-divisor division by G yields the unique
//! representative of each class with degree at most 1 in the last variable.

use crate::poly::MultiPoly;
use crate::scalar::GaussianRational;

#[derive(Clone, Debug)]
pub struct SphereContext {
    n: usize,
    g: MultiPoly,
}

impl SphereContext {
    /// Context for S^n embedded in n+1 variables.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "sphere dimension must be at least 1");
        let nvars = n + 1;
        let mut g = MultiPoly::constant(nvars, GaussianRational::from_int(-1));
        for i in 0..nvars {
            let xi = MultiPoly::var(nvars, i);
            g = &g + &(&xi * &xi);
        }
        SphereContext { n, g }
    }

    /// Sphere dimension n.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of ambient variables, n + 1.
    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    /// The defining polynomial G.
    pub fn g(&self) -> &MultiPoly {
        &self.g
    }

    /// Canonical representative of `f` modulo G, together with the multiplier
    /// h such that `f = h·G + reduced`.
    pub fn reduce(&self, f: &MultiPoly) -> (MultiPoly, MultiPoly) {
        assert_eq!(f.nvars(), self.nvars(), "variable count mismatch");
        let (h, r) = f.div_rem(&self.g);
        (r, h)
    }

    /// Whether `f` vanishes identically on the sphere.
    pub fn is_zero_on_sphere(&self, f: &MultiPoly) -> bool {
        self.reduce(f).0.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn p(src: &str) -> MultiPoly {
        let vars = vec!["x".into(), "y".into(), "z".into()];
        parse_poly(src, &vars).unwrap()
    }

    #[test]
    fn z_squared_reduces() {
        let ctx = SphereContext::new(2);
        let (r, h) = ctx.reduce(&p("z^2"));
        assert_eq!(r, p("1 - x^2 - y^2"));
        assert_eq!(h, p("1"));
    }

    #[test]
    fn already_reduced_is_fixed() {
        let ctx = SphereContext::new(2);
        let (r, h) = ctx.reduce(&p("x + y"));
        assert_eq!(r, p("x + y"));
        assert!(h.is_zero());
    }

    #[test]
    fn z_cubed() {
        let ctx = SphereContext::new(2);
        let (r, _) = ctx.reduce(&p("z^3"));
        assert_eq!(r, p("z - x^2*z - y^2*z"));
    }

    #[test]
    fn reduction_is_idempotent_and_exact() {
        let ctx = SphereContext::new(2);
        let f = p("z^4 + x*z^3 - 2*y^2*z^2 + x*y - 5");
        let (r, h) = ctx.reduce(&f);
        assert!(r.degree_in(2) <= 1);
        let (r2, h2) = ctx.reduce(&r);
        assert_eq!(r2, r);
        assert!(h2.is_zero());
        assert_eq!(&f - &r, &h * ctx.g());
    }
}
