//! One entry point for every method: reformulate-and-solve or run a
//! cutting-plane driver, and report what happened.

use std::time::{Duration, Instant};

use crate::cutplane::{self, CutPlaneConfig, CutPlaneResult, CutPlaneTrace, Termination};
use crate::error::{Error, Result};
use crate::model::{Method, Solution, SpecialCase, SumOfMaxProblem};
use crate::reformulate::{self, BlockMap};
use crate::robust_lp::{self, RobustLp, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Optimal,
    /// A cutting-plane run stopped on its iteration or time limit.
    NotConverged,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Optimal => "optimal",
            RunStatus::NotConverged => "not_converged",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub method: Method,
    pub x: Vec<f64>,
    pub value: f64,
    /// Cutting-plane iterations, or scenario-cut rounds for a reformulation.
    pub iterations: usize,
    pub status: RunStatus,
    pub exact: bool,
    pub elapsed: Duration,
    pub trace: Option<CutPlaneTrace>,
}

impl Report {
    pub fn solution(&self) -> Solution {
        Solution { x: self.x.clone(), value: self.value, method: self.method }
    }
}

/// Builds the robust LP of a reformulation method.
pub fn formulate(p: &SumOfMaxProblem, method: Method) -> Result<RobustLp> {
    Ok(match method {
        Method::Nominal => reformulate::nominal(p),
        Method::Rcr => reformulate::rcr(p),
        Method::Aarcr => reformulate::aarcr(p),
        Method::Eorlc => reformulate::eorlc(p)?,
        Method::Vertex => {
            if p.set.vertex_count().is_none() {
                return Err(Error::Unsupported(format!(
                    "vertex enumeration needs an explicit vertex list (box, v_polytope or simplex_product), not a {} set; use eorlc or alg1 instead",
                    p.set.kind_name()
                )));
            }
            reformulate::vertex_enumeration(p)?
        }
        Method::Split(k) => {
            let groups = reformulate::consecutive_groups(p.terms.len(), k);
            reformulate::sum_split(p, &groups, false)?
        }
        Method::Scenario => reformulate::scenario_formulation(p)?,
        Method::Special(SpecialCase::ProductSets) => {
            reformulate::special_product_sets(p, &BlockMap::from_supports(p))?
        }
        Method::Special(SpecialCase::CentrosymmetricAbs) => reformulate::special_centrosymmetric_abs(p)?,
        Method::Special(SpecialCase::CommonFactor) => {
            return Err(Error::Unsupported(
                "the common-factor case needs its α and β factors; call special_common_factor directly, or use eorlc".into(),
            ))
        }
        Method::Alg1 | Method::Alg2 | Method::Combined => {
            return Err(Error::Invalid(format!("{method} is an algorithm, not a formulation")))
        }
    })
}

pub fn solve(p: &SumOfMaxProblem, method: Method, cfg: &CutPlaneConfig) -> Result<Report> {
    let t0 = Instant::now();
    let driver: Option<fn(&SumOfMaxProblem, &CutPlaneConfig) -> Result<CutPlaneResult>> = match method {
        Method::Alg1 => Some(cutplane::algorithm1),
        Method::Alg2 => Some(cutplane::algorithm2),
        Method::Combined => Some(cutplane::combined),
        _ => None,
    };
    if let Some(run) = driver {
        let res = run(p, cfg)?;
        let status = match res.termination {
            Termination::Converged => RunStatus::Optimal,
            _ => RunStatus::NotConverged,
        };
        return Ok(Report {
            method,
            x: res.x,
            value: res.value,
            iterations: res.iterations,
            status,
            exact: true,
            elapsed: t0.elapsed(),
            trace: Some(res.trace),
        });
    }
    let r = formulate(p, method)?;
    let sol = robust_lp::solve(&r)?;
    match sol.status {
        SolveStatus::Infeasible => return Err(Error::Infeasible),
        SolveStatus::Unbounded => return Err(Error::Unbounded),
        _ => {}
    }
    Ok(Report {
        method,
        x: sol.x[..p.n_x].to_vec(),
        value: sol.value,
        iterations: sol.rounds,
        status: RunStatus::Optimal,
        exact: r.exact,
        elapsed: t0.elapsed(),
        trace: None,
    })
}
