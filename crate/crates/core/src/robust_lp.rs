//! LPs with robust rows, solved by scenario cuts or by dualization.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linsolve::conic::{solve_cone, ConeProgram, ConeStatus, SparseRow};
use crate::linsolve::{LpSession, LpStatus, RowKind};
use crate::model::{dot, Affine, BiaffineForm, UncertaintySet};
use crate::oracle::{self, WorstCase};

/// Where a variable of a reformulation comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarOrigin {
    /// Original decision variable.
    X(usize),
    /// Epigraph variable of term i.
    Y(usize),
    /// Constant part of the affine decision rule of term i.
    V(usize),
    /// ζ-coefficient `coord` of the decision rule of term i.
    W { term: usize, coord: usize },
    /// Epigraph variable of a sum-split group.
    Group(usize),
    /// ζ-coefficient of an adjustable group variable.
    GroupW { group: usize, coord: usize },
    /// Epigraph variable of term i at vertex k.
    VertexY { vertex: usize, term: usize },
    /// Replaces the ζ-free pieces of term i.
    Collapsed(usize),
    /// Scenario formulation: per-block epigraph.
    ScenarioZ(usize),
    /// Scenario formulation: `w_{iks}`.
    ScenarioW { term: usize, block: usize, scenario: usize },
    /// Scenario formulation: `y_{ijk}`.
    ScenarioY { term: usize, piece: usize, block: usize },
    /// Multiplier introduced when dualizing robust row r.
    Dual { row: usize, index: usize },
}

#[derive(Debug, Clone)]
pub struct VarInfo {
    pub origin: VarOrigin,
    pub lower: f64,
    pub upper: f64,
}

/// Deterministic row `Σ coef·v (≤ | =) rhs`.
#[derive(Debug, Clone)]
pub struct LinRow {
    pub coefs: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub rhs: f64,
}

/// `set ∩ {ζ : a ζ ≤ b}`.
#[derive(Debug, Clone)]
pub struct Region {
    pub set: UncertaintySet,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl Region {
    pub fn whole(set: UncertaintySet) -> Self {
        Region { set, a: Vec::new(), b: Vec::new() }
    }

    pub fn max_affine(&self, c: &[f64], c0: f64) -> Result<WorstCase> {
        if self.a.is_empty() {
            return oracle::max_affine(&self.set, c, c0);
        }
        let repr = self.restricted_repr()?;
        let (v, zeta) = repr.lp_max(c)?;
        Ok(WorstCase { value: c0 + v, zeta, assignment: Vec::new(), optimal: true })
    }

    fn restricted_repr(&self) -> Result<crate::model::LinearRepr> {
        let mut repr = self.set.linear_repr().map_err(|_| {
            Error::Unsupported("halfspace-restricted regions need a polyhedral set".into())
        })?;
        for (row, rhs) in self.a.iter().zip(&self.b) {
            repr.a.push(repr.pull_back(row));
            repr.b.push(rhs - dot(row, &repr.offset));
        }
        Ok(repr)
    }

    /// A point of the region, or `None` when it is empty.
    pub fn nominal(&self) -> Result<Option<Vec<f64>>> {
        let nom = self.set.nominal();
        if self.a.iter().zip(&self.b).all(|(r, b)| dot(r, &nom) <= *b + 1e-12) {
            return Ok(Some(nom));
        }
        let repr = self.restricted_repr()?;
        match repr.lp_max(&vec![0.0; self.set.dim()]) {
            Ok((_, z)) => Ok(Some(z)),
            Err(Error::EmptySet) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// `form(ζ, v) ≤ 0` for all ζ in `regions[region]`; `form` may cover only
/// a prefix of the variables.
#[derive(Debug, Clone)]
pub struct RobustRow {
    pub form: BiaffineForm,
    pub region: usize,
}

/// Finite variables, deterministic rows and robust rows; minimizes one
/// variable.
#[derive(Debug, Clone)]
pub struct RobustLp {
    pub vars: Vec<VarInfo>,
    pub objective: usize,
    pub rows: Vec<LinRow>,
    pub robust: Vec<RobustRow>,
    pub regions: Vec<Region>,
    /// True when the formulation is known to be exact for the source problem.
    pub exact: bool,
}

impl RobustLp {
    /// Starts a formulation over the original decisions `x` (with bounds).
    pub fn new(n_x: usize, objective: usize, lower: &[f64], upper: &[f64], set: UncertaintySet) -> Self {
        RobustLp {
            vars: (0..n_x).map(|j| VarInfo { origin: VarOrigin::X(j), lower: lower[j], upper: upper[j] }).collect(),
            objective,
            rows: Vec::new(),
            robust: Vec::new(),
            regions: vec![Region::whole(set)],
            exact: false,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn dim_zeta(&self) -> usize {
        self.regions[0].set.dim()
    }

    pub fn add_var(&mut self, origin: VarOrigin, lower: f64, upper: f64) -> usize {
        self.vars.push(VarInfo { origin, lower, upper });
        self.vars.len() - 1
    }

    pub fn add_free(&mut self, origin: VarOrigin) -> usize {
        self.add_var(origin, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_row(&mut self, coefs: Vec<(usize, f64)>, kind: RowKind, rhs: f64) {
        self.rows.push(LinRow { coefs, kind, rhs });
    }

    /// Robust row over the main set.
    pub fn add_robust(&mut self, form: BiaffineForm) {
        self.add_robust_in(form, 0);
    }

    pub fn add_robust_in(&mut self, form: BiaffineForm, region: usize) {
        debug_assert!(form.n_x() <= self.n_vars());
        self.robust.push(RobustRow { form, region });
    }

    pub fn add_region(&mut self, region: Region) -> usize {
        self.regions.push(region);
        self.regions.len() - 1
    }

    /// Variables whose origin matches the predicate.
    pub fn find_vars(&self, pred: impl Fn(&VarOrigin) -> bool) -> Vec<usize> {
        (0..self.n_vars()).filter(|&k| pred(&self.vars[k].origin)).collect()
    }

    /// Largest violation of any robust row at `v` (by the exact worst case).
    pub fn max_robust_violation(&self, v: &[f64]) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for r in &self.robust {
            let a = r.form.at_x(v);
            let wc = self.regions[r.region].max_affine(&a.coef, a.constant)?;
            worst = worst.max(wc.value);
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Stopped at a cutoff (lazy master); `value` is a lower bound only.
    CutOff,
}

#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub master_value: f64,
    pub cuts_added: usize,
}

#[derive(Debug, Clone)]
pub struct CutRecord {
    pub round: usize,
    pub row: usize,
    pub zeta: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RobustSolution {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    pub value: f64,
    /// Cuts added after the initial nominal seeds.
    pub cuts: usize,
    pub rounds: usize,
    /// Worst remaining robust-row value seen in the last round.
    pub max_violation: f64,
}

#[derive(Debug, Clone)]
pub struct CutOptions {
    /// Relative cut tolerance: a row is violated when its worst case exceeds
    /// `tol · (1 + |deterministic part|)`.
    pub tol: f64,
    /// Maximum number of non-seed cuts; `None` picks
    /// `max(10000, 10 · robust rows)`.
    pub max_cuts: Option<usize>,
}

impl Default for CutOptions {
    fn default() -> Self {
        CutOptions { tol: 1e-7, max_cuts: None }
    }
}

const ART_BOUND_START: f64 = 1e5;
const ART_BOUND_MAX: f64 = 1e11;

/// Incremental scenario-cut solver. Keep one per growing [`RobustLp`]:
/// variables, rows and robust rows added since the last call are loaded
/// into the existing master, which is re-solved from its previous basis.
pub struct CutSolver {
    master: LpSession,
    vars_loaded: usize,
    rows_loaded: usize,
    robust_loaded: usize,
    seen: Vec<HashSet<Vec<i64>>>,
    /// Empty regions make their rows vacuous.
    row_active: Vec<bool>,
    art_bound: Option<f64>,
    pub opts: CutOptions,
    pub cuts: usize,
    pub rounds: Vec<RoundRecord>,
    pub log: Vec<CutRecord>,
}

fn zeta_key(z: &[f64]) -> Vec<i64> {
    z.iter().map(|v| (v * 1e12).round() as i64).collect()
}

impl CutSolver {
    pub fn new(opts: CutOptions) -> Self {
        CutSolver {
            master: LpSession::new(),
            vars_loaded: 0,
            rows_loaded: 0,
            robust_loaded: 0,
            seen: Vec::new(),
            row_active: Vec::new(),
            art_bound: None,
            opts,
            cuts: 0,
            rounds: Vec::new(),
            log: Vec::new(),
        }
    }

    pub fn master_rows(&self) -> usize {
        self.master.n_rows()
    }

    fn bounds_of(&self, info: &VarInfo) -> (f64, f64) {
        match self.art_bound {
            Some(b) => (info.lower.max(-b), info.upper.min(b)),
            None => (info.lower, info.upper),
        }
    }

    fn sync(&mut self, r: &RobustLp) -> Result<()> {
        if r.n_vars() > self.vars_loaded {
            let mut new_vars = Vec::new();
            for k in self.vars_loaded..r.n_vars() {
                let (l, u) = self.bounds_of(&r.vars[k]);
                new_vars.push((if k == r.objective { 1.0 } else { 0.0 }, l, u));
            }
            self.master.add_vars(&new_vars);
            self.vars_loaded = r.n_vars();
        }
        for row in &r.rows[self.rows_loaded..] {
            self.master.add_row(&row.coefs, row.kind, row.rhs);
        }
        self.rows_loaded = r.rows.len();
        let mut nominal_cache: Vec<Option<Option<Vec<f64>>>> = vec![None; r.regions.len()];
        for idx in self.robust_loaded..r.robust.len() {
            let row = &r.robust[idx];
            if nominal_cache[row.region].is_none() {
                nominal_cache[row.region] = Some(r.regions[row.region].nominal()?);
            }
            self.seen.push(HashSet::new());
            match nominal_cache[row.region].as_ref().and_then(|n| n.clone()) {
                Some(z) => {
                    self.row_active.push(true);
                    self.add_cut(r, idx, &z, 0);
                }
                None => self.row_active.push(false),
            }
        }
        self.robust_loaded = r.robust.len();
        Ok(())
    }

    fn add_cut(&mut self, r: &RobustLp, idx: usize, zeta: &[f64], round: usize) -> bool {
        if !self.seen[idx].insert(zeta_key(zeta)) {
            return false;
        }
        let a = r.robust[idx].form.at_zeta(zeta);
        let coefs: Vec<(usize, f64)> =
            a.coef.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect();
        self.master.add_le(&coefs, -a.constant);
        if round > 0 {
            self.log.push(CutRecord { round, row: idx, zeta: zeta.to_vec() });
        }
        true
    }

    fn set_art_bound(&mut self, r: &RobustLp, b: Option<f64>) {
        self.art_bound = b;
        for k in 0..self.vars_loaded {
            let (l, u) = self.bounds_of(&r.vars[k]);
            self.master.set_bounds(k, l, u);
        }
    }

    /// Solves the current formulation. With `cutoff`, the master may stop
    /// once its bound reaches the cutoff.
    pub fn solve(&mut self, r: &RobustLp, cutoff: Option<f64>) -> Result<RobustSolution> {
        self.sync(r)?;
        let cap = self.opts.max_cuts.unwrap_or_else(|| 10_000usize.max(10 * r.robust.len()));
        loop {
            let res = self.master.solve_with_cutoff(cutoff)?;
            match res.status {
                LpStatus::Infeasible => return Ok(self.failed(SolveStatus::Infeasible)),
                LpStatus::Unbounded => {
                    let next = self.art_bound.map_or(ART_BOUND_START, |b| b * 100.0);
                    if next > ART_BOUND_MAX {
                        return Ok(self.failed(SolveStatus::Unbounded));
                    }
                    log::debug!("master unbounded; bounding variables by {next:e}");
                    self.set_art_bound(r, Some(next));
                    continue;
                }
                LpStatus::CutOff => {
                    return Ok(RobustSolution {
                        status: SolveStatus::CutOff,
                        x: res.x,
                        value: res.value,
                        cuts: self.cuts,
                        rounds: self.rounds.len(),
                        max_violation: f64::NAN,
                    })
                }
                LpStatus::Optimal => {}
            }
            let round = self.rounds.len() + 1;
            let mut added = 0;
            let mut max_violation = f64::NEG_INFINITY;
            for idx in 0..r.robust.len() {
                if !self.row_active[idx] {
                    continue;
                }
                let row = &r.robust[idx];
                let a = row.form.at_x(&res.x);
                let wc = r.regions[row.region].max_affine(&a.coef, a.constant)?;
                let det = a.constant.abs();
                max_violation = max_violation.max(wc.value);
                if wc.value > self.opts.tol * (1.0 + det) && self.add_cut(r, idx, &wc.zeta, round) {
                    added += 1;
                }
            }
            self.cuts += added;
            self.rounds.push(RoundRecord { master_value: res.value, cuts_added: added });
            if added == 0 {
                if let Some(b) = self.art_bound {
                    let at_bound = (0..self.vars_loaded).any(|k| {
                        let info = &r.vars[k];
                        (res.x[k].abs() >= b * (1.0 - 1e-9)) && (info.lower.abs() < b || info.upper.abs() < b)
                    });
                    if at_bound {
                        let next = b * 100.0;
                        if next > ART_BOUND_MAX {
                            return Ok(self.failed(SolveStatus::Unbounded));
                        }
                        self.set_art_bound(r, Some(next));
                        continue;
                    }
                }
                return Ok(RobustSolution {
                    status: SolveStatus::Optimal,
                    x: res.x,
                    value: res.value,
                    cuts: self.cuts,
                    rounds: self.rounds.len(),
                    max_violation: max_violation.max(0.0),
                });
            }
            if self.cuts > cap {
                return Err(Error::CutLimit(self.cuts));
            }
        }
    }

    fn failed(&self, status: SolveStatus) -> RobustSolution {
        RobustSolution {
            status,
            x: Vec::new(),
            value: if status == SolveStatus::Infeasible { f64::INFINITY } else { f64::NEG_INFINITY },
            cuts: self.cuts,
            rounds: self.rounds.len(),
            max_violation: f64::NAN,
        }
    }
}

/// Largest lifted formulation handed to the conic solver; bigger ones fall
/// back to scenario cuts.
const CONIC_VAR_CAP: usize = 2500;

/// True when some robust row ranges over an ellipsoidal set.
pub fn has_conic_rows(r: &RobustLp) -> bool {
    r.robust.iter().any(|row| !r.regions[row.region].set.is_polyhedral())
}

fn conic_size(r: &RobustLp) -> usize {
    r.n_vars()
        + r.robust
            .iter()
            .map(|row| match &r.regions[row.region].set {
                UncertaintySet::TruncatedEllipsoid { center, .. } => center.len(),
                _ => 0,
            })
            .sum::<usize>()
}

fn sparse(coefs: impl IntoIterator<Item = (usize, f64)>) -> SparseRow {
    coefs.into_iter().filter(|(_, v)| *v != 0.0).collect()
}

/// Second-order cone program of `r`, whose robust rows must all be
/// ellipsoidal. Variables beyond `r.n_vars()` are truncation multipliers.
fn cone_program(r: &RobustLp, art_bound: Option<f64>) -> Result<ConeProgram> {
    let mut p = ConeProgram { n: r.n_vars(), c: vec![0.0; r.n_vars()], ..Default::default() };
    p.c[r.objective] = 1.0;
    for (j, info) in r.vars.iter().enumerate() {
        let (lo, hi) = match art_bound {
            Some(b) => (info.lower.max(-b), info.upper.min(b)),
            None => (info.lower, info.upper),
        };
        if lo.is_finite() {
            p.lin.push((vec![(j, -1.0)], -lo));
        }
        if hi.is_finite() {
            p.lin.push((vec![(j, 1.0)], hi));
        }
    }
    for row in &r.rows {
        let coefs = sparse(row.coefs.iter().copied());
        match row.kind {
            RowKind::Le => p.lin.push((coefs, row.rhs)),
            RowKind::Eq => p.eq.push((coefs, row.rhs)),
        }
    }
    for row in &r.robust {
        let region = &r.regions[row.region];
        if !region.a.is_empty() {
            return Err(Error::Unsupported("halfspace-restricted ellipsoidal regions".into()));
        }
        let (center, radius, truncated) = match &region.set {
            UncertaintySet::Ellipsoid { center, radius } => (center, *radius, false),
            UncertaintySet::TruncatedEllipsoid { center, radius } => (center, *radius, true),
            other => {
                return Err(Error::Unsupported(format!("conic row over a {} set", other.kind_name())));
            }
        };
        let f = &row.form;
        let nf = f.n_x();
        // a(v) + b(v)ᵀc where b(v)_l = ζ-coefficient l
        let mut g0 = f.x_linear().to_vec();
        let mut h0 = f.constant();
        for (l, cl) in center.iter().enumerate() {
            if *cl != 0.0 {
                h0 += cl * f.zeta_linear()[l];
                axpy_slice(&mut g0, *cl, f.cross_row(l));
            }
        }
        if radius == 0.0 {
            p.lin.push((sparse(g0.into_iter().enumerate()), -h0));
            continue;
        }
        // ∃ μ ≥ 0: a + (b + μ)ᵀc + Ω‖b + μ‖ ≤ 0 (μ only for the truncated set)
        let mu: Vec<usize> = if truncated {
            let first = p.n;
            p.n += center.len();
            p.c.resize(p.n, 0.0);
            for k in first..p.n {
                p.lin.push((vec![(k, -1.0)], 0.0));
            }
            (first..p.n).collect()
        } else {
            Vec::new()
        };
        let mut block = Vec::with_capacity(center.len() + 1);
        let mut top: SparseRow = sparse(g0.iter().enumerate().map(|(j, v)| (j, v / radius)));
        for (l, &k) in mu.iter().enumerate() {
            if center[l] != 0.0 {
                top.push((k, center[l] / radius));
            }
        }
        block.push((top, -h0 / radius));
        for l in 0..center.len() {
            let mut g = sparse((0..nf).map(|j| (j, -f.cross_row(l)[j])));
            if truncated {
                g.push((mu[l], -1.0));
            }
            block.push((g, f.zeta_linear()[l]));
        }
        p.soc.push(block);
    }
    Ok(p)
}

fn axpy_slice(y: &mut [f64], a: f64, x: &[f64]) {
    for (u, v) in y.iter_mut().zip(x) {
        *u += a * v;
    }
}

/// Solves exactly: polyhedral robust rows are dualized and ellipsoidal ones
/// become second-order cone constraints.
pub fn conic_solve(r: &RobustLp) -> Result<RobustSolution> {
    let d = dualize_rows(r, true)?;
    let mut bound: Option<f64> = None;
    let failed = |status| RobustSolution {
        status,
        x: Vec::new(),
        value: if status == SolveStatus::Infeasible { f64::INFINITY } else { f64::NEG_INFINITY },
        cuts: 0,
        rounds: 1,
        max_violation: f64::NAN,
    };
    loop {
        let prog = cone_program(&d, bound)?;
        let res = solve_cone(&prog);
        match res.status {
            ConeStatus::Optimal => {
                let x = res.x[..r.n_vars()].to_vec();
                if let Some(b) = bound {
                    let at_bound = (0..r.n_vars()).any(|k| {
                        let info = &r.vars[k];
                        x[k].abs() >= b * (1.0 - 1e-6) && (info.lower.abs() < b || info.upper.abs() < b)
                    });
                    if at_bound {
                        let next = b * 100.0;
                        if next > ART_BOUND_MAX {
                            return Ok(failed(SolveStatus::Unbounded));
                        }
                        bound = Some(next);
                        continue;
                    }
                }
                let max_violation = r.max_robust_violation(&x)?.max(0.0);
                return Ok(RobustSolution {
                    status: SolveStatus::Optimal,
                    value: x[r.objective],
                    x,
                    cuts: 0,
                    rounds: 1,
                    max_violation,
                });
            }
            ConeStatus::Infeasible => return Ok(failed(SolveStatus::Infeasible)),
            ConeStatus::Unbounded => {
                let next = bound.map_or(ART_BOUND_START, |b| b * 100.0);
                if next > ART_BOUND_MAX {
                    return Ok(failed(SolveStatus::Unbounded));
                }
                log::debug!("conic problem unbounded; bounding variables by {next:e}");
                bound = Some(next);
            }
            ConeStatus::Stalled => return Err(Error::Numerical("conic interior-point method stalled".into())),
        }
    }
}

/// Re-solvable master for a growing formulation. While the formulation has
/// ellipsoidal rows and at most `conic_cap` lifted variables it is solved
/// afresh by the conic solver; otherwise one incremental [`CutSolver`]
/// carries over between calls.
pub struct MasterSolver {
    cuts: Option<CutSolver>,
    opts: CutOptions,
    pub conic_cap: usize,
    pub conic_solves: usize,
}

impl MasterSolver {
    pub fn new(opts: CutOptions) -> Self {
        MasterSolver { cuts: None, opts, conic_cap: 600, conic_solves: 0 }
    }

    pub fn solve(&mut self, r: &RobustLp, cutoff: Option<f64>) -> Result<RobustSolution> {
        if has_conic_rows(r) && conic_size(r) <= self.conic_cap {
            match conic_solve(r) {
                Err(Error::Numerical(msg)) => log::warn!("{msg}; falling back to scenario cuts"),
                other => {
                    self.conic_solves += 1;
                    return other;
                }
            }
        }
        let opts = self.opts.clone();
        self.cuts.get_or_insert_with(|| CutSolver::new(opts)).solve(r, cutoff)
    }

    /// Scenario cuts added so far by the incremental part.
    pub fn cuts(&self) -> usize {
        self.cuts.as_ref().map_or(0, |c| c.cuts)
    }
}

/// One-shot scenario-cut solve.
pub fn scenario_cut_solve(r: &RobustLp, opts: CutOptions) -> Result<(RobustSolution, CutSolver)> {
    let mut s = CutSolver::new(opts);
    let sol = s.solve(r, None)?;
    Ok((sol, s))
}

/// Solves with default options: ellipsoidal rows go to the conic solver
/// when the formulation is small enough, everything else to scenario cuts.
pub fn solve(r: &RobustLp) -> Result<RobustSolution> {
    if has_conic_rows(r) && conic_size(r) <= CONIC_VAR_CAP {
        match conic_solve(r) {
            Err(Error::Numerical(msg)) => log::warn!("{msg}; falling back to scenario cuts"),
            other => return other,
        }
    }
    Ok(scenario_cut_solve(r, CutOptions::default())?.0)
}

/// Replaces every robust row by its LP dual: with `ζ = o + Mη`,
/// `η ∈ {Aη ≤ b, Eη = f, l ≤ η ≤ u}`, the row `a₀(v) + a(v)ᵀζ ≤ 0` holds for
/// all ζ iff there are `λ ≥ 0, μ, π⁺, π⁻ ≥ 0` with
/// `Aᵀλ + Eᵀμ + π⁺ − π⁻ = Mᵀa(v)` and
/// `a₀(v) + a(v)ᵀo + bᵀλ + fᵀμ + uᵀπ⁺ − lᵀπ⁻ ≤ 0`.
pub fn dualize(r: &RobustLp) -> Result<RobustLp> {
    dualize_rows(r, false)
}

/// With `keep_conic`, rows over non-polyhedral sets are kept as robust rows.
fn dualize_rows(r: &RobustLp, keep_conic: bool) -> Result<RobustLp> {
    let mut out = r.clone();
    out.robust.clear();
    for (ri, row) in r.robust.iter().enumerate() {
        let region = &r.regions[row.region];
        if !region.set.is_polyhedral() {
            if keep_conic {
                out.robust.push(row.clone());
                continue;
            }
            return Err(Error::Unsupported(format!(
                "cannot dualize over a {} set; use scenario cuts",
                region.set.kind_name()
            )));
        }
        let repr = region.restricted_repr()?;
        let form = &row.form;
        let n_form = form.n_x();
        let mut index = 0;
        let mut new_var = |out: &mut RobustLp, lower: f64, upper: f64| {
            let v = out.add_var(VarOrigin::Dual { row: ri, index }, lower, upper);
            index += 1;
            v
        };
        // Row multipliers.
        let lam: Vec<usize> = (0..repr.a.len()).map(|_| new_var(&mut out, 0.0, f64::INFINITY)).collect();
        let mu: Vec<usize> =
            (0..repr.e.len()).map(|_| new_var(&mut out, f64::NEG_INFINITY, f64::INFINITY)).collect();
        let pi_up: Vec<Option<usize>> = (0..repr.n_eta)
            .map(|k| repr.upper[k].is_finite().then(|| new_var(&mut out, 0.0, f64::INFINITY)))
            .collect();
        let pi_lo: Vec<Option<usize>> = (0..repr.n_eta)
            .map(|k| repr.lower[k].is_finite().then(|| new_var(&mut out, 0.0, f64::INFINITY)))
            .collect();

        // a(v)_l = zeta_linear_l + cross_row_l · v;  (Mᵀ a(v))_k = Σ_l M[l][k] a_l(v)
        for k in 0..repr.n_eta {
            let mut coefs: Vec<(usize, f64)> = Vec::new();
            for (i, row_a) in repr.a.iter().enumerate() {
                if row_a[k] != 0.0 {
                    coefs.push((lam[i], row_a[k]));
                }
            }
            for (i, row_e) in repr.e.iter().enumerate() {
                if row_e[k] != 0.0 {
                    coefs.push((mu[i], row_e[k]));
                }
            }
            if let Some(p) = pi_up[k] {
                coefs.push((p, 1.0));
            }
            if let Some(p) = pi_lo[k] {
                coefs.push((p, -1.0));
            }
            let mut rhs = 0.0;
            let mut xcoef = vec![0.0; n_form];
            for l in 0..repr.map.len() {
                let m = repr.map[l][k];
                if m != 0.0 {
                    rhs += m * form.zeta_linear()[l];
                    for (c, a) in xcoef.iter_mut().zip(form.cross_row(l)) {
                        *c += m * a;
                    }
                }
            }
            for (j, c) in xcoef.into_iter().enumerate() {
                if c != 0.0 {
                    coefs.push((j, -c));
                }
            }
            out.add_row(coefs, RowKind::Eq, rhs);
        }
        // a₀(v) + a(v)ᵀo + bᵀλ + fᵀμ + uᵀπ⁺ − lᵀπ⁻ ≤ 0
        let mut coefs: Vec<(usize, f64)> = Vec::new();
        let mut xcoef = form.x_linear().to_vec();
        let mut constant = form.constant();
        for (l, o) in repr.offset.iter().enumerate() {
            if *o != 0.0 {
                constant += o * form.zeta_linear()[l];
                for (c, a) in xcoef.iter_mut().zip(form.cross_row(l)) {
                    *c += o * a;
                }
            }
        }
        for (j, c) in xcoef.into_iter().enumerate() {
            if c != 0.0 {
                coefs.push((j, c));
            }
        }
        for (i, b) in repr.b.iter().enumerate() {
            coefs.push((lam[i], *b));
        }
        for (i, f) in repr.f.iter().enumerate() {
            coefs.push((mu[i], *f));
        }
        for k in 0..repr.n_eta {
            if let Some(p) = pi_up[k] {
                coefs.push((p, repr.upper[k]));
            }
            if let Some(p) = pi_lo[k] {
                coefs.push((p, -repr.lower[k]));
            }
        }
        out.add_row(coefs, RowKind::Le, -constant);
    }
    Ok(out)
}

/// Evaluates an affine-in-ζ row's worst case (convenience for tests and
/// diagnostics).
pub fn worst_case_of(region: &Region, a: &Affine) -> Result<WorstCase> {
    region.max_affine(&a.coef, a.constant)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs_row() -> RobustLp {
        // min d  s.t.  ζ x ≤ d ∀ζ ∈ [-1, 1],  x ≥ 1
        let mut r = RobustLp::new(
            2,
            1,
            &[1.0, f64::NEG_INFINITY],
            &[f64::INFINITY, f64::INFINITY],
            UncertaintySet::unit_box(1),
        );
        let f = BiaffineForm::from_parts(0.0, vec![0.0, -1.0], vec![0.0], vec![vec![1.0, 0.0]]).unwrap();
        r.add_robust(f);
        r
    }

    #[test]
    fn cuts_and_dual_agree_on_abs_row() {
        let r = abs_row();
        let s = solve(&r).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.value - 1.0).abs() < 1e-9);
        let d = solve(&dualize(&r).unwrap()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-9);
        assert_eq!(d.cuts, 0);
    }

    #[test]
    fn no_robust_rows_means_one_master_solve() {
        let mut r = RobustLp::new(1, 0, &[2.0], &[5.0], UncertaintySet::unit_box(1));
        r.exact = true;
        let (s, solver) = scenario_cut_solve(&r, CutOptions::default()).unwrap();
        assert_eq!(s.value, 2.0);
        assert_eq!(solver.cuts, 0);
        assert_eq!(solver.rounds.len(), 1);
    }

    #[test]
    fn unbounded_master_is_recovered_with_artificial_box() {
        // min d  s.t.  d ≥ ζ x − x  ∀ζ ∈ [-1, 1], x free: optimum 0.
        let mut r = RobustLp::new(2, 1, &[f64::NEG_INFINITY; 2], &[f64::INFINITY; 2], UncertaintySet::unit_box(1));
        let f = BiaffineForm::from_parts(0.0, vec![-1.0, -1.0], vec![0.0], vec![vec![1.0, 0.0]]).unwrap();
        r.add_robust(f);
        let s = solve(&r).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!(s.value.abs() < 1e-9, "{}", s.value);
    }

    #[test]
    fn ellipsoid_cannot_be_dualized() {
        let mut r = abs_row();
        r.regions[0] = Region::whole(UncertaintySet::ellipsoid(vec![0.0], 1.0));
        assert!(matches!(dualize(&r), Err(Error::Unsupported(_))));
    }
}
