use super::simplex::{ColKind, Outcome, Simplex, SparseCol};
use super::{LpResult, LpStatus};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// `a·v ≤ b`
    Le,
    /// `a·v = b`
    Eq,
}

#[derive(Debug, Clone)]
struct RowData {
    coefs: Vec<(usize, f64)>,
    rhs: f64,
    kind: RowKind,
    col: usize,
}

/// An LP that can grow (rows, variables) and change bounds between solves.
///
/// Internally the simplex runs on the dual: every primal variable is a dual
/// equality row and every primal row a dual column. New primal rows are new
/// dual columns, which leave the previous optimal basis feasible, so
/// re-solving after adding cuts starts where the last solve stopped.
#[derive(Debug, Clone)]
pub struct LpSession {
    engine: Simplex,
    obj: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    lower_col: Vec<Option<usize>>,
    upper_col: Vec<Option<usize>>,
    rows: Vec<RowData>,
}

impl Default for LpSession {
    fn default() -> Self {
        Self::new()
    }
}

impl LpSession {
    pub fn new() -> Self {
        LpSession {
            engine: Simplex::new(),
            obj: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            lower_col: Vec::new(),
            upper_col: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.obj.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Total simplex pivots performed so far.
    pub fn pivots(&self) -> usize {
        self.engine.pivots
    }

    pub fn set_pivot_limit(&mut self, limit: usize) {
        self.engine.max_pivots = limit;
    }

    pub fn add_var(&mut self, obj: f64, lower: f64, upper: f64) -> usize {
        self.add_vars(&[(obj, lower, upper)])
    }

    /// Adds several variables at once; returns the index of the first.
    pub fn add_vars(&mut self, vars: &[(f64, f64, f64)]) -> usize {
        let first = self.obj.len();
        let rhs: Vec<f64> = vars.iter().map(|(c, _, _)| -c).collect();
        self.engine.add_rows(&rhs);
        for (k, &(c, l, u)) in vars.iter().enumerate() {
            let j = first + k;
            self.obj.push(c);
            self.lower.push(f64::NEG_INFINITY);
            self.upper.push(f64::INFINITY);
            self.lower_col.push(None);
            self.upper_col.push(None);
            self.set_bounds(j, l, u);
        }
        first
    }

    pub fn lower(&self, j: usize) -> f64 {
        self.lower[j]
    }

    pub fn upper(&self, j: usize) -> f64 {
        self.upper[j]
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        self.lower[j] = lower;
        self.upper[j] = upper;
        if lower.is_finite() {
            match self.lower_col[j] {
                Some(c) => self.engine.set_cost(c, -lower),
                None => {
                    let c = self.engine.add_col(SparseCol::unit(j, -1.0), -lower, ColKind::NonNeg);
                    self.lower_col[j] = Some(c);
                }
            }
        } else if let Some(c) = self.lower_col[j].take() {
            self.engine.fix_col(c);
        }
        if upper.is_finite() {
            match self.upper_col[j] {
                Some(c) => self.engine.set_cost(c, upper),
                None => {
                    let c = self.engine.add_col(SparseCol::unit(j, 1.0), upper, ColKind::NonNeg);
                    self.upper_col[j] = Some(c);
                }
            }
        } else if let Some(c) = self.upper_col[j].take() {
            self.engine.fix_col(c);
        }
    }

    /// Adds a row given as sparse `(variable, coefficient)` pairs.
    pub fn add_row(&mut self, coefs: &[(usize, f64)], kind: RowKind, rhs: f64) -> usize {
        let col = SparseCol::from_pairs(coefs.iter().copied());
        let kind_col = match kind {
            RowKind::Le => ColKind::NonNeg,
            RowKind::Eq => ColKind::Free,
        };
        let c = self.engine.add_col(col, rhs, kind_col);
        self.rows.push(RowData {
            coefs: coefs.iter().copied().filter(|(_, v)| *v != 0.0).collect(),
            rhs,
            kind,
            col: c,
        });
        self.rows.len() - 1
    }

    pub fn add_le(&mut self, coefs: &[(usize, f64)], rhs: f64) -> usize {
        self.add_row(coefs, RowKind::Le, rhs)
    }

    pub fn add_eq(&mut self, coefs: &[(usize, f64)], rhs: f64) -> usize {
        self.add_row(coefs, RowKind::Eq, rhs)
    }

    /// Dense convenience for `a·v ≤ b` over the first `a.len()` variables.
    pub fn add_le_dense(&mut self, a: &[f64], rhs: f64) -> usize {
        let coefs: Vec<(usize, f64)> = a.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect();
        self.add_le(&coefs, rhs)
    }

    pub fn basis(&self) -> Vec<usize> {
        self.engine.basis()
    }

    pub fn set_basis(&mut self, basis: &[usize]) -> Result<()> {
        self.engine.set_basis(basis)
    }

    pub fn solve(&mut self) -> Result<LpResult> {
        self.solve_with_cutoff(None)
    }

    /// Solves; with `Some(t)` the solve may stop as soon as the objective is
    /// proven to be at least `t` (status `CutOff`, `value` is that bound).
    pub fn solve_with_cutoff(&mut self, cutoff: Option<f64>) -> Result<LpResult> {
        let out = self.engine.solve(cutoff.map(|t| -t))?;
        match out {
            Outcome::Optimal => Ok(self.extract(LpStatus::Optimal)),
            Outcome::CutOff => {
                let mut r = self.extract(LpStatus::CutOff);
                r.value = r.dual_value;
                Ok(r)
            }
            Outcome::Unbounded => Ok(self.empty_result(LpStatus::Infeasible)),
            Outcome::Infeasible => {
                let status = if self.primal_feasible()? {
                    LpStatus::Unbounded
                } else {
                    LpStatus::Infeasible
                };
                Ok(self.empty_result(status))
            }
        }
    }

    /// Feasibility of the primal constraint set, decided on the dual with a
    /// zero objective: the dual is then feasible at zero and is unbounded
    /// exactly when the primal has no feasible point.
    fn primal_feasible(&self) -> Result<bool> {
        let mut s = LpSession::new();
        s.add_vars(
            &(0..self.n_vars())
                .map(|j| (0.0, self.lower[j], self.upper[j]))
                .collect::<Vec<_>>(),
        );
        for r in &self.rows {
            s.add_row(&r.coefs, r.kind, r.rhs);
        }
        Ok(!matches!(s.engine.solve(None)?, Outcome::Unbounded))
    }

    fn empty_result(&self, status: LpStatus) -> LpResult {
        LpResult {
            status,
            x: Vec::new(),
            value: match status {
                LpStatus::Infeasible => f64::INFINITY,
                _ => f64::NEG_INFINITY,
            },
            row_duals: Vec::new(),
            dual_value: f64::NAN,
        }
    }

    fn extract(&self, status: LpStatus) -> LpResult {
        let mut x = self.engine.multipliers();
        // Clip to bounds: the multipliers satisfy them up to tolerance.
        for (j, v) in x.iter_mut().enumerate() {
            *v = v.max(self.lower[j]).min(self.upper[j]);
        }
        let w = self.engine.values();
        let row_duals: Vec<f64> = self.rows.iter().map(|r| w[r.col]).collect();
        let value = self.obj.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpResult { status, x, value, row_duals, dual_value: -self.engine.objective() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incremental_rows_keep_optimality() {
        // min -x - y, x,y in [0, 10]
        let mut s = LpSession::new();
        s.add_var(-1.0, 0.0, 10.0);
        s.add_var(-1.0, 0.0, 10.0);
        let r = s.solve().unwrap();
        assert!((r.value + 20.0).abs() < 1e-9);
        s.add_le(&[(0, 1.0), (1, 1.0)], 4.0);
        let r = s.solve().unwrap();
        assert!((r.value + 4.0).abs() < 1e-9);
        s.add_le(&[(0, 1.0), (1, 3.0)], 6.0);
        s.add_le(&[(0, 3.0), (1, 1.0)], 6.0);
        let r = s.solve().unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.value + 3.0).abs() < 1e-9, "{}", r.value);
        assert!((r.x[0] - 1.5).abs() < 1e-9 && (r.x[1] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn new_variable_after_solve() {
        let mut s = LpSession::new();
        let x = s.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        s.add_le(&[(x, -1.0)], -2.0);
        assert!((s.solve().unwrap().value - 2.0).abs() < 1e-9);
        let y = s.add_var(1.0, 0.0, f64::INFINITY);
        s.add_le(&[(x, -1.0), (y, -1.0)], -5.0);
        let r = s.solve().unwrap();
        assert!((r.value - 5.0).abs() < 1e-9);
    }

    #[test]
    fn free_variable_unbounded_and_infeasible() {
        let mut s = LpSession::new();
        s.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        assert_eq!(s.solve().unwrap().status, LpStatus::Unbounded);
        let mut s = LpSession::new();
        s.add_var(1.0, 0.0, 1.0);
        s.add_le(&[(0, -1.0)], -2.0);
        assert_eq!(s.solve().unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_rows_and_bound_changes() {
        // min x0 + 2 x1  s.t.  x0 + x1 = 3, 0 <= x <= 2
        let mut s = LpSession::new();
        s.add_vars(&[(1.0, 0.0, 2.0), (2.0, 0.0, 2.0)]);
        s.add_eq(&[(0, 1.0), (1, 1.0)], 3.0);
        let r = s.solve().unwrap();
        assert!((r.value - 4.0).abs() < 1e-9);
        s.set_bounds(0, 0.0, 1.5);
        let r = s.solve().unwrap();
        assert!((r.value - 4.5).abs() < 1e-9);
        s.set_bounds(0, 0.0, 0.5);
        assert_eq!(s.solve().unwrap().status, LpStatus::Infeasible);
        s.set_bounds(0, 0.0, 2.0);
        let r = s.solve().unwrap();
        assert!((r.value - 4.0).abs() < 1e-9);
    }

    #[test]
    fn cutoff_reports_a_valid_bound() {
        let mut s = LpSession::new();
        for _ in 0..5 {
            s.add_var(-1.0, 0.0, 1.0);
        }
        s.add_le(&[(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0), (4, 1.0)], 2.5);
        let full = s.clone().solve().unwrap().value;
        let r = s.solve_with_cutoff(Some(-100.0)).unwrap();
        assert!(r.value <= full + 1e-9);
    }
}
