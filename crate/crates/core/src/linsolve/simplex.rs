//! Dense revised primal simplex for
//!
//! ```text
//! min  costᵀw   s.t.  Σ_j col_j · w_j = rhs,
//!      w_j ≥ 0 (NonNeg) | w_j free (Free) | w_j = 0 (Fixed)
//! ```
//!
//! Nonbasic columns always sit at zero, so the basic values are `B⁻¹·rhs`.
//! `Fixed` columns double as artificials: a basic fixed column holding a
//! positive value is an infeasibility that phase one drives to zero. This
//! lets rows, columns and cost changes be applied to a solved instance and
//! re-optimized from the previous basis.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ColKind {
    NonNeg,
    Free,
    Fixed,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct SparseCol {
    pub idx: Vec<usize>,
    pub val: Vec<f64>,
}

impl SparseCol {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut c = SparseCol::default();
        for (i, v) in pairs {
            if v != 0.0 {
                c.idx.push(i);
                c.val.push(v);
            }
        }
        c
    }

    pub fn unit(i: usize, v: f64) -> Self {
        SparseCol { idx: vec![i], val: vec![v] }
    }

    fn dot(&self, dense: &[f64]) -> f64 {
        self.idx.iter().zip(&self.val).map(|(i, v)| dense[*i] * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
    /// Phase two found an improving ray.
    Unbounded,
    /// Objective reached the requested cutoff before optimality.
    CutOff,
}

const NONBASIC: usize = usize::MAX;
const OPT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_BEFORE_BLAND: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Debug, Clone)]
pub(crate) struct Simplex {
    m: usize,
    cols: Vec<SparseCol>,
    cost: Vec<f64>,
    kind: Vec<ColKind>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    pos: Vec<usize>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    since_refactor: usize,
    pub pivots: usize,
    pub max_pivots: usize,
}

impl Simplex {
    pub fn new() -> Self {
        Simplex {
            m: 0,
            cols: Vec::new(),
            cost: Vec::new(),
            kind: Vec::new(),
            rhs: Vec::new(),
            basis: Vec::new(),
            pos: Vec::new(),
            binv: Vec::new(),
            xb: Vec::new(),
            since_refactor: 0,
            pivots: 0,
            max_pivots: 5_000_000,
        }
    }

    /// Appends rows with the given right-hand sides. Existing columns have
    /// zeros there; each new row receives a basic artificial carrying the
    /// residual, so the extended basis stays valid.
    pub fn add_rows(&mut self, rhs: &[f64]) {
        let k = rhs.len();
        if k == 0 {
            return;
        }
        let old = self.m;
        let m = old + k;
        let mut binv = vec![0.0; m * m];
        for r in 0..old {
            binv[r * m..r * m + old].copy_from_slice(&self.binv[r * old..(r + 1) * old]);
        }
        self.binv = binv;
        self.m = m;
        for (t, &h) in rhs.iter().enumerate() {
            let row = old + t;
            let sign = if h < 0.0 { -1.0 } else { 1.0 };
            let j = self.push_col(SparseCol::unit(row, sign), 0.0, ColKind::Fixed);
            self.binv[row * m + row] = sign;
            self.basis.push(j);
            self.pos[j] = row;
            self.xb.push(h.abs());
            self.rhs.push(h);
        }
    }

    fn push_col(&mut self, col: SparseCol, cost: f64, kind: ColKind) -> usize {
        self.cols.push(col);
        self.cost.push(cost);
        self.kind.push(kind);
        self.pos.push(NONBASIC);
        self.cols.len() - 1
    }

    /// Appends a nonbasic column (value zero, so the basis is unaffected).
    pub fn add_col(&mut self, col: SparseCol, cost: f64, kind: ColKind) -> usize {
        debug_assert!(col.idx.iter().all(|i| *i < self.m));
        self.push_col(col, cost, kind)
    }

    pub fn set_cost(&mut self, j: usize, c: f64) {
        self.cost[j] = c;
    }

    /// Turns a column into a fixed one (it may still be basic with a positive
    /// value, which phase one then removes).
    pub fn fix_col(&mut self, j: usize) {
        self.kind[j] = ColKind::Fixed;
        self.cost[j] = 0.0;
    }

    pub fn basis(&self) -> Vec<usize> {
        self.basis.clone()
    }

    /// Installs a previously saved basis and refactorizes.
    pub fn set_basis(&mut self, basis: &[usize]) -> Result<()> {
        assert_eq!(basis.len(), self.m);
        for &j in &self.basis {
            self.pos[j] = NONBASIC;
        }
        self.basis = basis.to_vec();
        for (r, &j) in self.basis.iter().enumerate() {
            self.pos[j] = r;
        }
        self.refactor()
    }

    /// Column values at the current basis.
    pub fn values(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.cols.len()];
        for (r, &j) in self.basis.iter().enumerate() {
            w[j] = self.xb[r];
        }
        w
    }

    /// Simplex multipliers `π = c_Bᵀ B⁻¹` for the true costs.
    pub fn multipliers(&self) -> Vec<f64> {
        self.pi_for(Phase::Two)
    }

    pub fn objective(&self) -> f64 {
        self.basis.iter().zip(&self.xb).map(|(&j, x)| self.cost[j] * x).sum()
    }

    fn phase_cost(&self, j: usize, phase: Phase) -> f64 {
        match phase {
            Phase::One => {
                if self.kind[j] == ColKind::Fixed {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => self.cost[j],
        }
    }

    fn pi_for(&self, phase: Phase) -> Vec<f64> {
        let m = self.m;
        let mut pi = vec![0.0; m];
        for (r, &j) in self.basis.iter().enumerate() {
            let c = self.phase_cost(j, phase);
            if c != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (p, b) in pi.iter_mut().zip(row) {
                    *p += c * b;
                }
            }
        }
        pi
    }

    fn infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(&j, _)| self.kind[j] == ColKind::Fixed)
            .map(|(_, x)| x.abs())
            .sum()
    }

    fn rhs_scale(&self) -> f64 {
        1.0 + self.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Rebuilds `B⁻¹` by Gauss-Jordan elimination with partial pivoting and
    /// recomputes the basic values. Dependent basis columns are swapped for
    /// fresh artificials.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        loop {
            let mut a = vec![0.0; m * m];
            for (r, &j) in self.basis.iter().enumerate() {
                let c = &self.cols[j];
                for (i, v) in c.idx.iter().zip(&c.val) {
                    a[i * m + r] = *v;
                }
            }
            let mut inv = vec![0.0; m * m];
            for i in 0..m {
                inv[i * m + i] = 1.0;
            }
            let mut singular_col = None;
            // Row operations on [a | inv]; row swaps are tracked in place.
            for k in 0..m {
                let (mut best, mut piv) = (0.0, k);
                for i in k..m {
                    let v = a[i * m + k].abs();
                    if v > best {
                        best = v;
                        piv = i;
                    }
                }
                if best < 1e-11 {
                    singular_col = Some(k);
                    break;
                }
                if piv != k {
                    for c in 0..m {
                        a.swap(k * m + c, piv * m + c);
                        inv.swap(k * m + c, piv * m + c);
                    }
                }
                let p = a[k * m + k];
                for c in 0..m {
                    a[k * m + c] /= p;
                    inv[k * m + c] /= p;
                }
                for i in 0..m {
                    if i != k {
                        let f = a[i * m + k];
                        if f != 0.0 {
                            for c in 0..m {
                                a[i * m + c] -= f * a[k * m + c];
                                inv[i * m + c] -= f * inv[k * m + c];
                            }
                        }
                    }
                }
            }
            match singular_col {
                None => {
                    self.binv = inv;
                    break;
                }
                Some(k) => {
                    // Basis position k is dependent on the others: replace it
                    // by an artificial on a row not spanned by them.
                    let row = self.uncovered_row(k);
                    let old = self.basis[k];
                    self.pos[old] = NONBASIC;
                    let j = self.push_col(SparseCol::unit(row, 1.0), 0.0, ColKind::Fixed);
                    self.basis[k] = j;
                    self.pos[j] = k;
                    log::debug!("simplex: replaced singular basis column {old} by artificial on row {row}");
                }
            }
        }
        self.recompute_xb();
        Ok(())
    }

    /// A row index that the basis columns other than position `skip` leave
    /// uncovered (least-squares style heuristic: the row with the smallest
    /// total weight).
    fn uncovered_row(&self, skip: usize) -> usize {
        let m = self.m;
        let mut weight = vec![0.0; m];
        for (r, &j) in self.basis.iter().enumerate() {
            if r == skip {
                continue;
            }
            let c = &self.cols[j];
            for (i, v) in c.idx.iter().zip(&c.val) {
                weight[*i] += v.abs();
            }
        }
        // Rows already owned by a basic unit artificial are covered.
        let mut best = 0;
        let mut best_w = f64::INFINITY;
        for (i, w) in weight.iter().enumerate() {
            if *w < best_w {
                best_w = *w;
                best = i;
            }
        }
        best
    }

    fn recompute_xb(&mut self) {
        let m = self.m;
        let mut xb = vec![0.0; m];
        for (r, x) in xb.iter_mut().enumerate() {
            let row = &self.binv[r * m..(r + 1) * m];
            *x = row.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
        }
        self.xb = xb;
    }

    fn residual(&self) -> f64 {
        let mut r = self.rhs.clone();
        for (p, &j) in self.basis.iter().enumerate() {
            let c = &self.cols[j];
            for (i, v) in c.idx.iter().zip(&c.val) {
                r[*i] -= v * self.xb[p];
            }
        }
        r.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    fn refactor_interval(&self) -> usize {
        100usize.max(self.m)
    }

    /// Optimizes from the current basis. `cutoff` stops phase two once the
    /// objective is at or below the given value.
    pub fn solve(&mut self, cutoff: Option<f64>) -> Result<Outcome> {
        if self.residual() > 1e-9 * self.rhs_scale() {
            self.refactor()?;
        }
        for _attempt in 0..4 {
            if self.infeasibility() > FEAS_TOL {
                self.run(Phase::One, None)?;
                if self.infeasibility() > 1e-7 * self.rhs_scale() {
                    if self.since_refactor > 0 {
                        self.refactor()?;
                        continue;
                    }
                    return Ok(Outcome::Infeasible);
                }
            }
            let out = self.run(Phase::Two, cutoff)?;
            if out != Outcome::Optimal {
                return Ok(out);
            }
            // Confirm with fresh basic values before reporting optimality.
            if self.since_refactor > 0 && self.residual() > 1e-9 * self.rhs_scale() {
                self.refactor()?;
            }
            let bad = self.basis.iter().zip(&self.xb).any(|(&j, &x)| match self.kind[j] {
                ColKind::NonNeg => x < -1e-7,
                ColKind::Fixed => x.abs() > 1e-7,
                ColKind::Free => false,
            });
            if !bad {
                for (r, &j) in self.basis.iter().enumerate() {
                    if self.kind[j] != ColKind::Free && self.xb[r] < 0.0 {
                        self.xb[r] = 0.0;
                    }
                }
                return Ok(Outcome::Optimal);
            }
            // Drift: basic values slightly out of bounds; flip negative
            // nonnegatives into phase-one territory by refactoring and retry.
            self.refactor()?;
            let still_bad = self.basis.iter().zip(&self.xb).any(|(&j, &x)| {
                self.kind[j] == ColKind::NonNeg && x < -1e-7
            });
            if still_bad {
                self.repair_negative();
            }
        }
        Err(Error::IterationLimit(self.pivots))
    }

    /// Replaces basic nonnegative columns with negative values by artificials
    /// so phase one can restore feasibility.
    fn repair_negative(&mut self) {
        let m = self.m;
        for r in 0..m {
            let j = self.basis[r];
            if self.kind[j] == ColKind::NonNeg && self.xb[r] < -1e-7 {
                // Pivot in an artificial column equal to B·e_r scaled so that
                // its value is positive: column = -B e_r keeps B⁻¹ structure.
                let mut col = self.cols[j].clone();
                for v in col.val.iter_mut() {
                    *v = -*v;
                }
                self.pos[j] = NONBASIC;
                let a = self.push_col(col, 0.0, ColKind::Fixed);
                self.basis[r] = a;
                self.pos[a] = r;
                for c in 0..m {
                    self.binv[r * m + c] = -self.binv[r * m + c];
                }
                self.xb[r] = -self.xb[r];
            }
        }
    }

    fn run(&mut self, phase: Phase, cutoff: Option<f64>) -> Result<Outcome> {
        let m = self.m;
        let mut degenerate = 0usize;
        let mut alpha = vec![0.0; m];
        let norms: Vec<f64> = self
            .cols
            .iter()
            .map(|c| 1.0 + c.val.iter().map(|v| v * v).sum::<f64>())
            .collect();
        loop {
            if self.pivots >= self.max_pivots {
                return Err(Error::IterationLimit(self.pivots));
            }
            if phase == Phase::One && self.infeasibility() <= FEAS_TOL {
                return Ok(Outcome::Optimal);
            }
            if phase == Phase::Two {
                if let Some(c) = cutoff {
                    if self.objective() <= c {
                        return Ok(Outcome::CutOff);
                    }
                }
            }
            let bland = degenerate > DEGENERATE_BEFORE_BLAND;
            let pi = self.pi_for(phase);

            // Pricing.
            let mut enter = None;
            let mut best_score = 0.0;
            for j in 0..self.cols.len() {
                if self.pos[j] != NONBASIC {
                    continue;
                }
                let kind = self.kind[j];
                if kind == ColKind::Fixed {
                    continue;
                }
                let cj = if phase == Phase::One { 0.0 } else { self.cost[j] };
                let d = cj - self.cols[j].dot(&pi);
                let dir = match kind {
                    ColKind::NonNeg if d < -OPT_TOL => 1.0,
                    ColKind::Free if d.abs() > OPT_TOL => -d.signum(),
                    _ => continue,
                };
                if bland {
                    enter = Some((j, dir));
                    break;
                }
                let score = d * d / norms.get(j).copied().unwrap_or(1.0);
                if score > best_score {
                    best_score = score;
                    enter = Some((j, dir));
                }
            }
            let Some((q, s)) = enter else {
                return Ok(Outcome::Optimal);
            };

            // α = B⁻¹ a_q
            let col = &self.cols[q];
            for (r, a) in alpha.iter_mut().enumerate() {
                let row = &self.binv[r * m..(r + 1) * m];
                *a = col.idx.iter().zip(&col.val).map(|(i, v)| row[*i] * v).sum();
            }

            // Ratio test (Harris two-pass; Bland picks the smallest column index).
            let mut theta_max = f64::INFINITY;
            for r in 0..m {
                let dir = s * alpha[r];
                if let Some(bound) = self.blocking(r, dir, phase, FEAS_TOL) {
                    theta_max = theta_max.min(bound);
                }
            }
            if theta_max == f64::INFINITY {
                if phase == Phase::One {
                    // Cannot happen in exact arithmetic; refresh and retry.
                    self.refactor()?;
                    degenerate += 1;
                    if degenerate > 10 * DEGENERATE_BEFORE_BLAND {
                        return Err(Error::IterationLimit(self.pivots));
                    }
                    continue;
                }
                return Ok(Outcome::Unbounded);
            }
            let mut leave = None;
            let mut leave_key = (f64::NEG_INFINITY, usize::MAX);
            for r in 0..m {
                let dir = s * alpha[r];
                if let Some(ratio) = self.blocking(r, dir, phase, 0.0) {
                    if ratio <= theta_max {
                        let key = if bland {
                            (0.0, self.basis[r])
                        } else {
                            (dir.abs(), 0)
                        };
                        let better = if bland {
                            key.1 < leave_key.1
                        } else {
                            key.0 > leave_key.0
                        };
                        if better || leave.is_none() {
                            leave_key = key;
                            leave = Some((r, ratio.max(0.0)));
                        }
                    }
                }
            }
            let (p, t) = leave.expect("ratio test found a bound");

            for r in 0..m {
                self.xb[r] -= t * s * alpha[r];
            }
            self.xb[p] = s * t;
            let out = self.basis[p];
            self.pos[out] = NONBASIC;
            self.basis[p] = q;
            self.pos[q] = p;

            let piv = alpha[p];
            {
                let (before, rest) = self.binv.split_at_mut(p * m);
                let (prow, after) = rest.split_at_mut(m);
                for v in prow.iter_mut() {
                    *v /= piv;
                }
                for (r, row) in before.chunks_mut(m).enumerate() {
                    let f = alpha[r];
                    if f != 0.0 {
                        for (a, b) in row.iter_mut().zip(prow.iter()) {
                            *a -= f * b;
                        }
                    }
                }
                for (k, row) in after.chunks_mut(m).enumerate() {
                    let f = alpha[p + 1 + k];
                    if f != 0.0 {
                        for (a, b) in row.iter_mut().zip(prow.iter()) {
                            *a -= f * b;
                        }
                    }
                }
            }

            self.pivots += 1;
            self.since_refactor += 1;
            if t <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            if self.since_refactor >= self.refactor_interval() {
                self.refactor()?;
            }
        }
    }

    /// Step length allowed by basic position `r` when it moves by `-t·dir`.
    fn blocking(&self, r: usize, dir: f64, phase: Phase, tol: f64) -> Option<f64> {
        let j = self.basis[r];
        let x = self.xb[r];
        match self.kind[j] {
            ColKind::Free => None,
            ColKind::NonNeg => (dir > PIVOT_TOL).then(|| (x + tol) / dir),
            ColKind::Fixed => {
                if phase == Phase::One && x > FEAS_TOL {
                    (dir > PIVOT_TOL).then(|| (x + tol) / dir)
                } else {
                    (dir.abs() > PIVOT_TOL).then(|| tol / dir.abs())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_standard_form() {
        // min -x1 - x2  s.t. x1 + s1 = 1, x2 + s2 = 2, all >= 0
        let mut s = Simplex::new();
        s.add_rows(&[1.0, 2.0]);
        s.add_col(SparseCol::unit(0, 1.0), -1.0, ColKind::NonNeg);
        s.add_col(SparseCol::unit(1, 1.0), -1.0, ColKind::NonNeg);
        s.add_col(SparseCol::unit(0, 1.0), 0.0, ColKind::NonNeg);
        s.add_col(SparseCol::unit(1, 1.0), 0.0, ColKind::NonNeg);
        assert_eq!(s.solve(None).unwrap(), Outcome::Optimal);
        assert!((s.objective() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        // x = -1 with x >= 0
        let mut s = Simplex::new();
        s.add_rows(&[-1.0]);
        s.add_col(SparseCol::unit(0, 1.0), 1.0, ColKind::NonNeg);
        assert_eq!(s.solve(None).unwrap(), Outcome::Infeasible);

        // min -x s.t. x - y = 0, x, y >= 0
        let mut s = Simplex::new();
        s.add_rows(&[0.0]);
        s.add_col(SparseCol::unit(0, 1.0), -1.0, ColKind::NonNeg);
        s.add_col(SparseCol::unit(0, -1.0), 0.0, ColKind::NonNeg);
        assert_eq!(s.solve(None).unwrap(), Outcome::Unbounded);
    }

    #[test]
    fn warm_start_after_new_column() {
        let mut s = Simplex::new();
        s.add_rows(&[4.0]);
        s.add_col(SparseCol::unit(0, 1.0), 3.0, ColKind::NonNeg);
        assert_eq!(s.solve(None).unwrap(), Outcome::Optimal);
        assert!((s.objective() - 12.0).abs() < 1e-12);
        let before = s.pivots;
        s.add_col(SparseCol::unit(0, 2.0), 1.0, ColKind::NonNeg);
        assert_eq!(s.solve(None).unwrap(), Outcome::Optimal);
        assert!((s.objective() - 2.0).abs() < 1e-12);
        assert_eq!(s.pivots - before, 1);
    }
}
