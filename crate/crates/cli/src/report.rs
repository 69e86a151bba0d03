//! The machine-readable report document every command emits. The layout is
//! frozen by docs/report-schema.json: {command, input_echo, results, bounds,
//! degenerate_flags, timings}. Polynomials are canonical-form strings,
//! complex numbers are {"re": "a/b", "im": "c/d"}.

use dkit_core::poly::MultiPoly;
use dkit_core::roots::Isolated;
use dkit_core::scalar::GaussianRational;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub input_echo: Value,
    pub results: Value,
    pub bounds: Option<Value>,
    pub degenerate_flags: Vec<String>,
    pub timings: Timings,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

pub fn poly_json(p: &MultiPoly, vars: &[String]) -> Value {
    Value::String(p.render(vars))
}

pub fn complex_json(c: &GaussianRational) -> Value {
    json!({ "re": c.re.to_string(), "im": c.im.to_string() })
}

pub fn interval_json(iso: &Isolated) -> Value {
    json!({
        "lo": iso.lo.to_string(),
        "hi": iso.hi.to_string(),
        "approx": iso.midpoint_f64(),
        "multiplicity": iso.multiplicity,
    })
}

pub fn bounds_json(b: &dkit_core::darboux::BoundsReport) -> Value {
    json!({
        "thm1b": b.thm1b,
        "thm1d": b.thm1d,
        "thm2_total": b.thm2_total,
        "thm2_point": b.thm2_point,
        "thm3b": b.thm3b,
        "thm3d": b.thm3d,
        "thm4": b.thm4,
        "thm5": b.thm5,
        "d_of_m": b.d_of_m,
    })
}
