//! Instances: the two toy problems, the regression, brachytherapy-like and
//! inventory examples, and random instances. All generators are pure
//! functions of their arguments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BiaffineForm, SideConstraint, SumOfMaxProblem, UncertaintySet};
use crate::rng::{self, Rand};

fn nonneg(var: usize) -> SideConstraint {
    SideConstraint::Bound { var, lower: Some(0.0), upper: None }
}

/// `x + s·(ζ-combination)` over variables `(x, d)`.
fn toy_piece(zeta: &[f64]) -> BiaffineForm {
    let l = zeta.len();
    BiaffineForm::from_parts(0.0, vec![1.0, 0.0], zeta.to_vec(), vec![vec![0.0; 2]; l]).unwrap()
}

/// `min d  s.t.  d ≥ max{x, x+ζ} + max{x, x−ζ}  ∀ζ ∈ [−1,1]`, `x ≥ 0`.
/// Variables `(x, d)`.
pub fn toy1() -> SumOfMaxProblem {
    let terms = vec![vec![toy_piece(&[0.0]), toy_piece(&[1.0])], vec![toy_piece(&[0.0]), toy_piece(&[-1.0])]];
    SumOfMaxProblem::new(2, 1, UncertaintySet::unit_box(1), BiaffineForm::zeros(2, 1), terms, vec![nonneg(0)]).unwrap()
}

/// Four terms `max{x, x ± ζ₁ ± ζ₂}` over `[−1,1]²`, `x ≥ 0`.
pub fn toy2() -> SumOfMaxProblem {
    let terms = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]
        .iter()
        .map(|s| vec![toy_piece(&[0.0, 0.0]), toy_piece(s)])
        .collect();
    SumOfMaxProblem::new(2, 1, UncertaintySet::unit_box(2), BiaffineForm::zeros(2, 2), terms, vec![nonneg(0)]).unwrap()
}

/// Least absolute deviations regression with multiplicative errors in the
/// regressor. Variables `(β₀, β₁, d)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Regression {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub omega: f64,
}

impl Regression {
    /// Draws `xᵢ ~ U[0,100]`, a measurement error ζ uniform in the ball of
    /// radius Ω, `εᵢ ~ N(0,1)` and `yᵢ = 2 + 5(1+ζᵢ)xᵢ + εᵢ`.
    pub fn generate(n: usize, omega: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid("regression needs at least two observations".into()));
        }
        let mut r = rng::seeded(seed);
        let x: Vec<f64> = (0..n).map(|_| rng::uniform(&mut r, 0.0, 100.0)).collect();
        let zeta = rng::in_ball(&mut r, &vec![0.0; n], omega);
        let y = (0..n).map(|i| 2.0 + 5.0 * (1.0 + zeta[i]) * x[i] + rng::normal(&mut r)).collect();
        Ok(Regression { x, y, omega })
    }

    /// `Σ max{±(yᵢ − β₀ − β₁(1+ζᵢ)xᵢ)}` over `‖ζ‖₂ ≤ Ω`.
    pub fn problem(&self) -> SumOfMaxProblem {
        let n = self.x.len();
        let terms = (0..n)
            .map(|i| {
                let mut f = BiaffineForm::zeros(3, n);
                f.set_constant(self.y[i]);
                f.set_x(0, -1.0);
                f.set_x(1, -self.x[i]);
                f.set_cross(i, 1, -self.x[i]);
                vec![f.clone(), f.scaled(-1.0)]
            })
            .collect();
        let set = UncertaintySet::ellipsoid(vec![0.0; n], self.omega);
        SumOfMaxProblem::new(3, 2, set, BiaffineForm::zeros(3, n), terms, vec![]).unwrap()
    }

    /// Exact worst-case objective `Σ|yᵢ − β₀ − β₁xᵢ| + Ω|β₁|‖x‖₂`.
    pub fn worst_case(&self, b0: f64, b1: f64) -> f64 {
        let norm = self.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.x.iter().zip(&self.y).map(|(x, y)| (y - b0 - b1 * x).abs()).sum::<f64>() + self.omega * b1.abs() * norm
    }
}

/// Regression instance as a problem, see [`Regression`].
pub fn regression(n: usize, omega: f64, seed: u64) -> Result<(SumOfMaxProblem, Regression)> {
    let data = Regression::generate(n, omega, seed)?;
    Ok((data.problem(), data))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InventoryParams {
    pub periods: usize,
    pub omega: f64,
    pub dbar: f64,
    pub c_h: f64,
    pub c_b: f64,
    pub x0: f64,
    /// Use the plain ball instead of its intersection with `ζ ≥ 0`.
    pub ellipsoid: bool,
}

impl Default for InventoryParams {
    fn default() -> Self {
        InventoryParams { periods: 12, omega: 10.0, dbar: 5.0, c_h: 1.0, c_b: 2.0, x0: 0.0, ellipsoid: false }
    }
}

/// Index of the coefficient of demand `k` in the order rule of period `t`
/// (`k < t`), after the `T` constant parts.
pub fn inventory_rule_index(periods: usize, t: usize, k: usize) -> usize {
    debug_assert!(k < t && t < periods);
    periods + t * (t - 1) / 2 + k
}

/// Single-item inventory with backlogging and affine order rules
/// `q_t(ζ) = q⁰_t + Σ_{k<t} Q_{tk} ζ_k`, ζ the demand. The costs are
/// `Σ_t max{c_h I_t, −c_b I_t}` with `I_t = x₀ + Σ_{i≤t} (q_i − ζ_i)`, and
/// every order must be nonnegative for all demands.
///
/// Variables: `q⁰` (T), then `Q` row by row, then `d`.
pub fn inventory(params: &InventoryParams) -> Result<SumOfMaxProblem> {
    let t_max = params.periods;
    if t_max == 0 {
        return Err(Error::Invalid("inventory needs at least one period".into()));
    }
    let n = t_max + t_max * (t_max - 1) / 2 + 1;
    let d = n - 1;
    // Order of period t as a form over (ζ, variables).
    let order = |t: usize| {
        let mut f = BiaffineForm::zeros(n, t_max);
        f.set_x(t, 1.0);
        for k in 0..t {
            f.set_cross(k, inventory_rule_index(t_max, t, k), 1.0);
        }
        f
    };
    let mut level = BiaffineForm::zeros(n, t_max);
    level.set_constant(params.x0);
    let mut terms = Vec::with_capacity(t_max);
    let mut side = Vec::with_capacity(t_max);
    for t in 0..t_max {
        let q = order(t);
        level.add_scaled(&q, 1.0);
        level.add_zeta(t, -1.0);
        terms.push(vec![level.scaled(params.c_h), level.scaled(-params.c_b)]);
        side.push(SideConstraint::Robust(q.scaled(-1.0)));
    }
    let center = vec![params.dbar; t_max];
    let set = if params.ellipsoid {
        UncertaintySet::Ellipsoid { center, radius: params.omega }
    } else {
        UncertaintySet::TruncatedEllipsoid { center, radius: params.omega }
    };
    SumOfMaxProblem::new(n, d, set, BiaffineForm::zeros(n, t_max), terms, side)
}

/// Synthetic dose planning: `Σᵢ max{0, αᵢ(Lᵢ − doseᵢ), βᵢ(doseᵢ − Uᵢ)}` with
/// `doseᵢ = Σ_k (B_{ik} ζ_k)ᵀ t_k`, ζ_k in a simplex over the `n_sides`
/// possible catheter positions. Each catheter has two dwell positions.
/// Variables: dwell times (nonnegative), then `d`.
pub fn brachy_like(n_points: usize, n_catheters: usize, n_sides: usize, seed: u64) -> Result<SumOfMaxProblem> {
    const DWELL: usize = 2;
    if n_points == 0 || n_catheters == 0 || n_sides == 0 {
        return Err(Error::Invalid("brachytherapy instance needs points, catheters and sides".into()));
    }
    let mut r = rng::seeded(seed);
    let n = n_catheters * DWELL + 1;
    let l = n_catheters * n_sides;
    let mut terms = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let mut dose = BiaffineForm::zeros(n, l);
        for k in 0..n_catheters {
            // Rates fall off with a random distance; each side perturbs them.
            let base = 1.0 / (1.0 + rng::uniform(&mut r, 0.0, 3.0)).powi(2);
            for p in 0..DWELL {
                for s in 0..n_sides {
                    let rate = base * rng::uniform(&mut r, 0.7, 1.3);
                    dose.set_cross(k * n_sides + s, k * DWELL + p, rate);
                }
            }
        }
        // Half the points are in the target, the rest in healthy tissue.
        let (lo, hi) = if i % 2 == 0 {
            let lo = rng::uniform(&mut r, 8.0, 10.0);
            (lo, lo * 1.5)
        } else {
            (0.0, rng::uniform(&mut r, 2.0, 4.0))
        };
        let alpha = rng::uniform(&mut r, 0.5, 1.5);
        let beta = rng::uniform(&mut r, 0.5, 1.5);
        let mut under = dose.scaled(-alpha);
        under.set_constant(alpha * lo);
        let mut over = dose.scaled(beta);
        over.set_constant(-beta * hi);
        terms.push(vec![BiaffineForm::zeros(n, l), under, over]);
    }
    let side = (0..n - 1).map(nonneg).collect();
    let set = UncertaintySet::SimplexProduct { blocks: vec![n_sides; n_catheters] };
    SumOfMaxProblem::new(n, n - 1, set, BiaffineForm::zeros(n, l), terms, side)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Box,
    Ellipsoid,
    TruncatedEllipsoid,
    VPolytope,
    HPolytope,
    Budgeted,
    SimplexProduct,
}

impl std::str::FromStr for SetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "box" => SetKind::Box,
            "ellipsoid" => SetKind::Ellipsoid,
            "truncated_ellipsoid" => SetKind::TruncatedEllipsoid,
            "v_polytope" => SetKind::VPolytope,
            "h_polytope" => SetKind::HPolytope,
            "budgeted" => SetKind::Budgeted,
            "simplex_product" => SetKind::SimplexProduct,
            _ => return Err(Error::Invalid(format!("unknown set kind {s:?}"))),
        })
    }
}

/// Sizes of a random instance. `n_x` counts the decisions besides `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub n_x: usize,
    pub terms: usize,
    pub pieces: usize,
    pub dim_zeta: usize,
}

/// A random set of the given kind and dimension.
pub fn random_set(kind: SetKind, l: usize, r: &mut Rand) -> UncertaintySet {
    match kind {
        SetKind::Box => UncertaintySet::unit_box(l),
        SetKind::Ellipsoid => UncertaintySet::ellipsoid(vec![0.0; l], 1.0),
        SetKind::TruncatedEllipsoid => UncertaintySet::TruncatedEllipsoid { center: vec![1.0; l], radius: 1.5 },
        SetKind::VPolytope => {
            let count = l + 1 + (rng::uniform(r, 0.0, 3.0) as usize);
            let vertices = (0..count).map(|_| (0..l).map(|_| rng::uniform(r, -1.0, 1.0)).collect()).collect();
            UncertaintySet::VPolytope { vertices }
        }
        SetKind::HPolytope => {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for k in 0..l {
                for s in [1.0, -1.0] {
                    let mut row = vec![0.0; l];
                    row[k] = s;
                    a.push(row);
                    b.push(1.0);
                }
            }
            for _ in 0..l {
                a.push((0..l).map(|_| rng::uniform(r, -1.0, 1.0)).collect());
                b.push(rng::uniform(r, 0.3, 1.0));
            }
            UncertaintySet::HPolytope { a, b }
        }
        SetKind::Budgeted => {
            let budgets = (0..l).map(|k| (k + 1) as f64 * rng::uniform(r, 0.3, 0.8)).collect();
            UncertaintySet::Budgeted { budgets }
        }
        SetKind::SimplexProduct => {
            let mut blocks = Vec::new();
            let mut left = l;
            while left > 0 {
                let b = left.min(1 + (rng::uniform(r, 0.0, 3.0) as usize));
                blocks.push(b);
                left -= b;
            }
            UncertaintySet::SimplexProduct { blocks }
        }
    }
}

/// A random form with coefficients from `U[−100, 100]`, zero on `d`.
pub fn random_form(n: usize, l: usize, d: usize, r: &mut Rand) -> BiaffineForm {
    let mut f = BiaffineForm::zeros(n, l);
    f.set_constant(rng::uniform(r, -100.0, 100.0));
    for j in 0..n {
        if j != d {
            f.set_x(j, rng::uniform(r, -100.0, 100.0));
        }
    }
    for k in 0..l {
        f.set_zeta(k, rng::uniform(r, -100.0, 100.0));
        for j in 0..n {
            if j != d {
                f.set_cross(k, j, rng::uniform(r, -100.0, 100.0));
            }
        }
    }
    f
}

/// Random instance with all coefficients from `U[−100, 100]`, decisions in
/// `[−1, 1]` and `d` last.
pub fn random_instance(dims: Dims, kind: SetKind, seed: u64) -> SumOfMaxProblem {
    let mut r = rng::seeded(seed);
    let n = dims.n_x + 1;
    let l = dims.dim_zeta.max(1);
    let set = random_set(kind, l, &mut r);
    let base = random_form(n, l, dims.n_x, &mut r);
    let terms = (0..dims.terms.max(1))
        .map(|_| (0..dims.pieces.max(1)).map(|_| random_form(n, l, dims.n_x, &mut r)).collect())
        .collect();
    let side = (0..dims.n_x)
        .map(|var| SideConstraint::Bound { var, lower: Some(-1.0), upper: Some(1.0) })
        .collect();
    SumOfMaxProblem::new(n, dims.n_x, set, base, terms, side).expect("random instances are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::serialize_problem;

    #[test]
    fn inventory_shape() {
        let p = inventory(&InventoryParams::default()).unwrap();
        assert_eq!(p.n_x, 79);
        assert_eq!(p.terms.len(), 12);
        assert_eq!(p.robust_side_rows().count(), 12);
        assert_eq!(inventory_rule_index(12, 11, 10), 12 + 65);
    }

    #[test]
    fn regression_matches_closed_form_at_zero_error() {
        let (p, data) = regression(15, 0.05, 7).unwrap();
        let beta = [2.0, 5.0, 0.0];
        let nominal = p.evaluate_lhs(&vec![0.0; 15], &beta).unwrap();
        let closed = data.worst_case(2.0, 5.0) - 0.05 * 5.0 * data.x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((nominal - closed).abs() < 1e-9);
    }

    #[test]
    fn generators_are_deterministic() {
        let dims = Dims { n_x: 2, terms: 3, pieces: 2, dim_zeta: 3 };
        for kind in [SetKind::Box, SetKind::VPolytope, SetKind::Budgeted, SetKind::SimplexProduct, SetKind::HPolytope] {
            let a = serialize_problem(&random_instance(dims, kind, 11)).unwrap();
            let b = serialize_problem(&random_instance(dims, kind, 11)).unwrap();
            assert_eq!(a, b);
        }
        let a = serialize_problem(&brachy_like(6, 2, 3, 1).unwrap()).unwrap();
        assert_eq!(a, serialize_problem(&brachy_like(6, 2, 3, 1).unwrap()).unwrap());
    }
}
