//! The JSON system specification consumed by every command: variable names,
//! component expressions under the exact polynomial grammar, ambient/sphere
//! mode, optional candidate surfaces and exponential factors, and numeric
//! options.

use dkit_core::field::PolyVectorField;
use dkit_core::parse::parse_poly;
use dkit_core::poly::MultiPoly;
use dkit_core::sphere::SphereContext;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SystemSpec {
    pub variables: Vec<String>,
    pub components: Vec<String>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub candidates: Candidates,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Ambient,
    Sphere,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
pub struct Candidates {
    #[serde(default)]
    pub surfaces: Vec<String>,
    #[serde(default)]
    pub exp_factors: Vec<ExpFactorSpec>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ExpFactorSpec {
    pub g: String,
    pub h: String,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
pub struct Options {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub stepsize: Option<f64>,
    pub steps: Option<usize>,
    pub trials: Option<usize>,
    pub count: Option<usize>,
    pub n: Option<usize>,
    pub degrees: Option<Vec<u32>>,
}

/// Input-level failure: maps to exit code 2.
#[derive(Clone, Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "input error: {}", self.0)
    }
}

impl std::error::Error for InputError {}

/// A validated system: parsed field, optional sphere context, parsed
/// candidates.
pub struct ParsedSystem {
    pub spec: SystemSpec,
    pub field: PolyVectorField,
    pub ctx: Option<SphereContext>,
    pub candidate_surfaces: Vec<MultiPoly>,
    pub candidate_exp_factors: Vec<(MultiPoly, MultiPoly)>,
}

impl SystemSpec {
    pub fn from_json(src: &str) -> Result<Self, InputError> {
        serde_json::from_str(src).map_err(|e| InputError(format!("invalid spec JSON: {e}")))
    }

    pub fn parse(&self) -> Result<ParsedSystem, InputError> {
        if self.variables.is_empty() {
            return Err(InputError("at least one variable is required".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &self.variables {
            if v == "i" {
                return Err(InputError(
                    "`i` is the imaginary unit and cannot be a variable name".into(),
                ));
            }
            if v.is_empty()
                || !v.chars().next().unwrap().is_ascii_alphabetic() && !v.starts_with('_')
                || !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(InputError(format!("invalid variable name `{v}`")));
            }
            if !seen.insert(v.clone()) {
                return Err(InputError(format!("duplicate variable `{v}`")));
            }
        }
        if self.components.len() != self.variables.len() {
            return Err(InputError(format!(
                "{} components for {} variables",
                self.components.len(),
                self.variables.len()
            )));
        }
        let parse = |src: &str| -> Result<MultiPoly, InputError> {
            parse_poly(src, &self.variables)
                .map_err(|e| InputError(format!("in `{src}`: {e}")))
        };
        let components = self
            .components
            .iter()
            .map(|c| parse(c))
            .collect::<Result<Vec<_>, _>>()?;
        let field = PolyVectorField::new(components);
        let ctx = match self.mode {
            Mode::Sphere => {
                if self.variables.len() < 2 {
                    return Err(InputError(
                        "sphere mode needs at least two ambient variables".into(),
                    ));
                }
                Some(SphereContext::new(self.variables.len() - 1))
            }
            Mode::Ambient => None,
        };
        let candidate_surfaces = self
            .candidates
            .surfaces
            .iter()
            .map(|s| parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        let candidate_exp_factors = self
            .candidates
            .exp_factors
            .iter()
            .map(|ef| Ok((parse(&ef.g)?, parse(&ef.h)?)))
            .collect::<Result<Vec<_>, InputError>>()?;
        Ok(ParsedSystem {
            spec: self.clone(),
            field,
            ctx,
            candidate_surfaces,
            candidate_exp_factors,
        })
    }
}
