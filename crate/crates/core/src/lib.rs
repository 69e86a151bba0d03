//! Exact symbolic analysis of Darboux integrability for polynomial vector
//! fields in R^n and on the unit sphere S^n: invariant hyperplanes, meridians
//! and parallels with cofactors and multiplicities via extactic polynomials,
//! Darboux first integrals and time-dependent invariants from cofactor
//! relations, closed-form bound formulas, and floating-point cross-checks.
//!
//! All symbolic computation is exact over the Gaussian rationals Q(i);
//! floating point only appears in the `numeric` cross-validation layer.

pub mod arith;
pub mod darboux;
pub mod extactic;
pub mod field;
pub mod fixtures;
pub mod linalg;
pub mod numeric;
pub mod parse;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod sphere;
pub mod surfaces;

pub use field::{DegreeVector, PolyVectorField, TangencyCertificate};
pub use parse::{parse_poly, ParseError};
pub use poly::{Monomial, MultiPoly};
pub use scalar::{GaussianRational, Rat};
pub use sphere::SphereContext;

pub use num_complex;
