use serde::{Deserialize, Serialize};

use super::{BiaffineForm, SideConstraint, SumOfMaxProblem, UncertaintySet};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormJson {
    constant: f64,
    x_linear: Vec<f64>,
    zeta_linear: Vec<f64>,
    cross: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SideJson {
    Robust { form: FormJson },
    Bound { var: usize, lower: Option<f64>, upper: Option<f64> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemJson {
    n_x: usize,
    d_index: usize,
    set: UncertaintySet,
    base: FormJson,
    terms: Vec<Vec<FormJson>>,
    #[serde(default)]
    side_constraints: Vec<SideJson>,
}

impl FormJson {
    fn from_form(f: &BiaffineForm) -> Self {
        FormJson {
            constant: f.constant(),
            x_linear: f.x_linear().to_vec(),
            zeta_linear: f.zeta_linear().to_vec(),
            cross: f.cross_rows(),
        }
    }

    fn into_form(self) -> Result<BiaffineForm> {
        BiaffineForm::from_parts(self.constant, self.x_linear, self.zeta_linear, self.cross)
    }
}

/// Reads a problem from its JSON text and validates it.
pub fn parse_problem(text: &str) -> Result<SumOfMaxProblem> {
    let raw: ProblemJson = serde_json::from_str(text)?;
    let terms = raw
        .terms
        .into_iter()
        .map(|t| t.into_iter().map(FormJson::into_form).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let side = raw
        .side_constraints
        .into_iter()
        .map(|s| match s {
            SideJson::Robust { form } => form.into_form().map(SideConstraint::Robust),
            SideJson::Bound { var, lower, upper } => Ok(SideConstraint::Bound { var, lower, upper }),
        })
        .collect::<Result<Vec<_>>>()?;
    SumOfMaxProblem::new(raw.n_x, raw.d_index, raw.set, raw.base.into_form()?, terms, side)
}

/// Canonical JSON text for a problem. Fails on non-finite data, which JSON
/// cannot represent.
pub fn serialize_problem(p: &SumOfMaxProblem) -> Result<String> {
    p.validate()?;
    let raw = ProblemJson {
        n_x: p.n_x,
        d_index: p.d_index,
        set: p.set.clone(),
        base: FormJson::from_form(&p.base),
        terms: p.terms.iter().map(|t| t.iter().map(FormJson::from_form).collect()).collect(),
        side_constraints: p
            .side_constraints
            .iter()
            .map(|s| match s {
                SideConstraint::Robust(f) => SideJson::Robust { form: FormJson::from_form(f) },
                SideConstraint::Bound { var, lower, upper } => {
                    SideJson::Bound { var: *var, lower: *lower, upper: *upper }
                }
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&raw)?)
}

pub fn read_problem(path: &std::path::Path) -> Result<SumOfMaxProblem> {
    let text = std::fs::read_to_string(path).map_err(Error::Io)?;
    parse_problem(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"{
        "n_x": 2, "d_index": 1,
        "set": {"kind": "box", "center": [0.0], "radius": 1.0},
        "base": {"constant": 0.0, "x_linear": [0.0, 0.0], "zeta_linear": [0.0], "cross": [[0.0, 0.0]]},
        "terms": [[
            {"constant": 0.0, "x_linear": [0.0, 0.0], "zeta_linear": [0.0], "cross": [[0.0, 0.0]]},
            {"constant": 0.1, "x_linear": [1.0, 0.0], "zeta_linear": [1.0], "cross": [[0.0, 0.0]]}
        ]],
        "side_constraints": [{"kind": "bound", "var": 0, "lower": 0.0, "upper": null}]
    }"#;

    #[test]
    fn round_trip_is_exact() {
        let p = parse_problem(TINY).unwrap();
        let s = serialize_problem(&p).unwrap();
        let q = parse_problem(&s).unwrap();
        assert_eq!(p, q);
        assert_eq!(s, serialize_problem(&q).unwrap());
    }

    #[test]
    fn nan_cannot_be_serialized() {
        let mut p = parse_problem(TINY).unwrap();
        p.base.set_constant(f64::NAN);
        assert!(serialize_problem(&p).is_err());
    }

    #[test]
    fn unknown_fields_are_schema_errors() {
        let bad = TINY.replacen("\"n_x\"", "\"nx_typo\": 1, \"n_x\"", 1);
        assert!(matches!(parse_problem(&bad), Err(Error::Parse(_))));
    }
}
