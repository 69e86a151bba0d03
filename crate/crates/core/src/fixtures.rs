//! Ready-made example systems on S² used across tests, benchmarks, and docs.

use crate::field::PolyVectorField;
use crate::parse::parse_poly;
use crate::poly::MultiPoly;

pub fn vars_xyz() -> Vec<String> {
    vec!["x".into(), "y".into(), "z".into()]
}

pub fn pxyz(src: &str) -> MultiPoly {
    parse_poly(src, &vars_xyz()).expect("fixture parses")
}

fn field(srcs: [&str; 3]) -> PolyVectorField {
    PolyVectorField::new(srcs.iter().map(|s| pxyz(s)).collect())
}

/// Complex degree-(2,2,2) field on S² with three invariant meridians
/// x+iy, x−iy, x+y and tangency cofactor −2z.
pub fn complex_three_meridian_field() -> PolyVectorField {
    field([
        "i*y*(x+y) - 2*x*z",
        "-i*x*(x+y) - 2*y*z",
        "1 + x^2 + y^2 - z^2",
    ])
}

/// Real field on S² of declared degree (1,2,2) whose unique invariant
/// parallel z = 0 attains the parallel-count bound; tangency cofactor −2y.
pub fn single_parallel_field() -> PolyVectorField {
    field(["y", "1 - x - x^2 - y^2 + z^2", "-2*y*z"])
}

/// Real degree-(2,2,2) field on S² with exactly two real invariant
/// meridians x = 0 and y = 0 (the maximum a real quadratic field attains).
pub fn real_two_meridian_field() -> PolyVectorField {
    field(["-3*x*z", "-4*y*z", "1 + 2*x^2 + 3*y^2 - z^2"])
}

/// Rigid rotation about the z-axis: tangency cofactor 0, two complex
/// meridians, every parallel invariant (degenerate parallel report).
pub fn rotation_field() -> PolyVectorField {
    field(["-y", "x", "0"])
}

/// Tangent field whose meridian extactic vanishes identically: every
/// meridian is invariant.
pub fn degenerate_meridian_field() -> PolyVectorField {
    field(["x*z", "y*z", "z^2 - 1"])
}

/// Real tangent field with the planted parallel z = 1/2 (last component
/// x·(z − 1/2)).
pub fn planted_half_parallel_field() -> PolyVectorField {
    field(["1/2*z - z^2", "0", "x*z - 1/2*x"])
}
