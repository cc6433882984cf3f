use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BiaffineForm, UncertaintySet};
use crate::error::{Error, Result};

/// Constraints that accompany the sum-of-maxima row.
#[derive(Debug, Clone, PartialEq)]
pub enum SideConstraint {
    /// `form(ζ, x) ≤ 0` for every ζ in the problem's set.
    Robust(BiaffineForm),
    /// Deterministic bounds on one decision variable.
    Bound { var: usize, lower: Option<f64>, upper: Option<f64> },
}

/// `min d  s.t.  ℓ(ζ,x) + Σᵢ maxⱼ ℓᵢⱼ(ζ,x) ≤ d  ∀ζ ∈ Z`, where `d = x[d_index]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumOfMaxProblem {
    pub n_x: usize,
    pub d_index: usize,
    pub set: UncertaintySet,
    pub base: BiaffineForm,
    pub terms: Vec<Vec<BiaffineForm>>,
    pub side_constraints: Vec<SideConstraint>,
}

impl SumOfMaxProblem {
    pub fn new(
        n_x: usize,
        d_index: usize,
        set: UncertaintySet,
        base: BiaffineForm,
        terms: Vec<Vec<BiaffineForm>>,
        side_constraints: Vec<SideConstraint>,
    ) -> Result<Self> {
        let p = SumOfMaxProblem { n_x, d_index, set, base, terms, side_constraints };
        p.validate()?;
        Ok(p)
    }

    pub fn dim_zeta(&self) -> usize {
        self.set.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_index >= self.n_x {
            return Err(Error::Invalid(format!("d_index {} out of range for {} variables", self.d_index, self.n_x)));
        }
        self.set.validate()?;
        let l = self.dim_zeta();
        let check = |f: &BiaffineForm, what: String| -> Result<()> {
            if f.n_x() != self.n_x || f.dim_zeta() != l {
                return Err(Error::Dimension(format!(
                    "{what} has shape (ζ: {}, x: {}), expected ({l}, {})",
                    f.dim_zeta(),
                    f.n_x(),
                    self.n_x
                )));
            }
            if !f.is_finite() {
                return Err(Error::NonFinite(what));
            }
            Ok(())
        };
        check(&self.base, "base".into())?;
        if self.terms.is_empty() {
            return Err(Error::Invalid("at least one max term is required".into()));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if t.is_empty() {
                return Err(Error::EmptyMaxTerm(i));
            }
            for (j, f) in t.iter().enumerate() {
                check(f, format!("term {i} piece {j}"))?;
            }
        }
        for (k, s) in self.side_constraints.iter().enumerate() {
            match s {
                SideConstraint::Robust(f) => check(f, format!("side constraint {k}"))?,
                SideConstraint::Bound { var, lower, upper } => {
                    if *var >= self.n_x {
                        return Err(Error::Invalid(format!("bound on variable {var} out of range")));
                    }
                    let l = lower.unwrap_or(f64::NEG_INFINITY);
                    let u = upper.unwrap_or(f64::INFINITY);
                    if l.is_nan() || u.is_nan() || lower.is_some_and(|v| v.is_infinite()) || upper.is_some_and(|v| v.is_infinite()) {
                        return Err(Error::NonFinite(format!("bound on variable {var}")));
                    }
                    if l > u {
                        return Err(Error::Invalid(format!("empty bounds on variable {var}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// `ℓ(ζ,x) + Σᵢ maxⱼ ℓᵢⱼ(ζ,x)`.
    pub fn evaluate_lhs(&self, zeta: &[f64], x: &[f64]) -> Result<f64> {
        if zeta.len() != self.dim_zeta() || x.len() != self.n_x {
            return Err(Error::Dimension(format!(
                "expected ζ of length {} and x of length {}, got {} and {}",
                self.dim_zeta(),
                self.n_x,
                zeta.len(),
                x.len()
            )));
        }
        Ok(self.lhs(zeta, x))
    }

    pub(crate) fn lhs(&self, zeta: &[f64], x: &[f64]) -> f64 {
        self.base.eval(zeta, x)
            + self
                .terms
                .iter()
                .map(|t| t.iter().map(|f| f.eval(zeta, x)).fold(f64::NEG_INFINITY, f64::max))
                .sum::<f64>()
    }

    /// Variable bounds implied by the `Bound` side constraints.
    pub fn var_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::NEG_INFINITY; self.n_x];
        let mut hi = vec![f64::INFINITY; self.n_x];
        for s in &self.side_constraints {
            if let SideConstraint::Bound { var, lower, upper } = s {
                if let Some(l) = lower {
                    lo[*var] = lo[*var].max(*l);
                }
                if let Some(u) = upper {
                    hi[*var] = hi[*var].min(*u);
                }
            }
        }
        (lo, hi)
    }

    pub fn robust_side_rows(&self) -> impl Iterator<Item = &BiaffineForm> {
        self.side_constraints.iter().filter_map(|s| match s {
            SideConstraint::Robust(f) => Some(f),
            SideConstraint::Bound { .. } => None,
        })
    }

    /// `Πᵢ |Jᵢ|` as a float (it can overflow any integer type).
    pub fn assignment_count(&self) -> f64 {
        self.terms.iter().map(|t| t.len() as f64).product()
    }

    /// The form `ℓ + Σᵢ ℓ_{i,j(i)}` for a given assignment.
    pub fn assignment_form(&self, assignment: &[usize]) -> BiaffineForm {
        let mut f = self.base.clone();
        for (t, &j) in self.terms.iter().zip(assignment) {
            f.add_scaled(&t[j], 1.0);
        }
        f
    }

    /// Same problem with the uncertainty set replaced.
    pub fn with_set(&self, set: UncertaintySet) -> Result<Self> {
        let mut p = self.clone();
        p.set = set;
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCase {
    ProductSets,
    CentrosymmetricAbs,
    CommonFactor,
}

/// Which formulation or algorithm produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Method {
    Nominal,
    Rcr,
    Aarcr,
    Eorlc,
    Vertex,
    Alg1,
    Alg2,
    Combined,
    /// Sum splitting into this many consecutive groups.
    Split(usize),
    Scenario,
    Special(SpecialCase),
}

impl Method {
    /// Methods that solve the problem exactly (up to the stopping tolerance).
    pub fn is_exact(&self) -> bool {
        matches!(self, Method::Eorlc | Method::Vertex | Method::Alg1 | Method::Alg2 | Method::Combined | Method::Special(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Nominal => f.write_str("nominal"),
            Method::Rcr => f.write_str("rcr"),
            Method::Aarcr => f.write_str("aarcr"),
            Method::Eorlc => f.write_str("eorlc"),
            Method::Vertex => f.write_str("vertex"),
            Method::Alg1 => f.write_str("alg1"),
            Method::Alg2 => f.write_str("alg2"),
            Method::Combined => f.write_str("combined"),
            Method::Split(k) => write!(f, "split:{k}"),
            Method::Scenario => f.write_str("scenario"),
            Method::Special(SpecialCase::ProductSets) => f.write_str("special:product"),
            Method::Special(SpecialCase::CentrosymmetricAbs) => f.write_str("special:abs"),
            Method::Special(SpecialCase::CommonFactor) => f.write_str("special:common_factor"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "nominal" => Method::Nominal,
            "rcr" => Method::Rcr,
            "aarcr" => Method::Aarcr,
            "eorlc" => Method::Eorlc,
            "vertex" => Method::Vertex,
            "alg1" => Method::Alg1,
            "alg2" => Method::Alg2,
            "combined" => Method::Combined,
            "scenario" => Method::Scenario,
            "special:product" => Method::Special(SpecialCase::ProductSets),
            "special:abs" => Method::Special(SpecialCase::CentrosymmetricAbs),
            "special:common_factor" => Method::Special(SpecialCase::CommonFactor),
            _ => {
                if let Some(k) = s.strip_prefix("split:") {
                    let k: usize = k.parse().map_err(|_| Error::Invalid(format!("bad group count in {s:?}")))?;
                    if k == 0 {
                        return Err(Error::Invalid("split needs at least one group".into()));
                    }
                    Method::Split(k)
                } else {
                    return Err(Error::Invalid(format!("unknown method {s:?}")));
                }
            }
        })
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A decision vector together with the value the method reported for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub x: Vec<f64>,
    pub value: f64,
    pub method: Method,
}
