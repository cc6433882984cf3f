//! Internal LP and MILP solvers.

pub mod conic;
mod dense;
mod milp;
mod session;
pub(crate) mod simplex;

pub use milp::{solve_milp, Milp, MilpOptions, MilpResult, MilpStatus};
pub use session::{LpSession, RowKind};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// The solve stopped early because the objective bound passed the
    /// requested cutoff; `value` is a valid lower bound, `x` is not feasible.
    CutOff,
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    /// One multiplier per row (`≥ 0` for `≤` rows), in the sign convention
    /// `c + Aᵀy` balanced by bound multipliers.
    pub row_duals: Vec<f64>,
    /// Objective of the dual solution; never above `value` at optimality.
    pub dual_value: f64,
}

/// `min cᵀv  s.t.  Av ≤ b,  Ev = f,  lower ≤ v ≤ upper`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub e: Vec<Vec<f64>>,
    pub f: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearProgram {
    /// An LP over `n` variables with `v ≥ 0` and no rows.
    pub fn new(c: Vec<f64>) -> Self {
        let n = c.len();
        LinearProgram {
            c,
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            ..Default::default()
        }
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn le(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.a.push(row);
        self.b.push(rhs);
        self
    }

    pub fn eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.e.push(row);
        self.f.push(rhs);
        self
    }

    pub fn bounds(mut self, j: usize, lower: f64, upper: f64) -> Self {
        self.lower[j] = lower;
        self.upper[j] = upper;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Dimension("bound vectors must match c".into()));
        }
        if self.a.len() != self.b.len() || self.e.len() != self.f.len() {
            return Err(Error::Dimension("row count must match right-hand side".into()));
        }
        for row in self.a.iter().chain(&self.e) {
            if row.len() != n {
                return Err(Error::Dimension(format!("row of length {} for {n} variables", row.len())));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("constraint matrix".into()));
            }
        }
        if self.c.iter().chain(&self.b).chain(&self.f).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("objective or right-hand side".into()));
        }
        for j in 0..n {
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] > self.upper[j] {
                return Err(Error::Invalid(format!("bad bounds on variable {j}")));
            }
        }
        Ok(())
    }

    pub(crate) fn session(&self) -> LpSession {
        let mut s = LpSession::new();
        let vars: Vec<(f64, f64, f64)> =
            (0..self.n()).map(|j| (self.c[j], self.lower[j], self.upper[j])).collect();
        s.add_vars(&vars);
        for (row, rhs) in self.a.iter().zip(&self.b) {
            s.add_le_dense(row, *rhs);
        }
        for (row, rhs) in self.e.iter().zip(&self.f) {
            let coefs: Vec<(usize, f64)> = row.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect();
            s.add_eq(&coefs, *rhs);
        }
        s
    }
}

/// Solves an LP from scratch. `row_duals` lists the `≤` rows first, then the
/// equalities.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpResult> {
    lp.validate()?;
    lp.session().solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_small_cases() {
        let r = solve_lp(&LinearProgram::new(vec![-1.0]).le(vec![1.0], 1.0)).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.value + 1.0).abs() < 1e-12);

        let r = solve_lp(&LinearProgram::new(vec![1.0]).le(vec![1.0], -1.0)).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);

        let r = solve_lp(&LinearProgram::new(vec![-1.0])).unwrap();
        assert_eq!(r.status, LpStatus::Unbounded);
    }

    #[test]
    fn rejects_ragged_rows() {
        let lp = LinearProgram::new(vec![1.0, 1.0]).le(vec![1.0], 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::Dimension(_))));
    }
}
