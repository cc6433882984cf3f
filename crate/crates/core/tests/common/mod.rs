//! Instance generators and brute-force references shared by the
//! integration tests.
#![allow(dead_code)]

use rosom::cutplane::CutPlaneConfig;
use rosom::linsolve::{solve_lp, LinearProgram, LpStatus};
use rosom::model::{Affine, BiaffineForm, SideConstraint, SumOfMaxProblem, UncertaintySet};
use rosom::reformulate::Triaffine;
use rosom::rng::{self, Rand};
use rosom::solve::solve;
use rosom::Method;

pub fn value(p: &SumOfMaxProblem, m: Method) -> f64 {
    solve(p, m, &CutPlaneConfig::default()).unwrap_or_else(|e| panic!("{m}: {e}")).value
}

fn u(r: &mut Rand) -> f64 {
    rng::uniform(r, -100.0, 100.0)
}

fn boxed(n_x: usize) -> Vec<SideConstraint> {
    (0..n_x).map(|var| SideConstraint::Bound { var, lower: Some(-1.0), upper: Some(1.0) }).collect()
}

/// A ζ-free form over `n` variables with zero weight on `d`.
fn det_form(n: usize, l: usize, d: usize, r: &mut Rand) -> BiaffineForm {
    let x = (0..n).map(|j| if j == d { 0.0 } else { u(r) }).collect();
    BiaffineForm::deterministic(u(r), x, l)
}

/// A form whose ζ-dependence is restricted to `coords`.
fn form_on(n: usize, l: usize, d: usize, coords: &[usize], r: &mut Rand) -> BiaffineForm {
    let mut f = det_form(n, l, d, r);
    for &k in coords {
        f.set_zeta(k, u(r));
        for j in (0..n).filter(|&j| j != d) {
            f.set_cross(k, j, u(r));
        }
    }
    f
}

/// Terms over disjoint coordinate blocks of a box, ζ-free base.
pub fn product_instance(seed: u64) -> SumOfMaxProblem {
    let mut r = rng::seeded(seed);
    let n_x = 2;
    let n = n_x + 1;
    let m = 2 + (rng::uniform(&mut r, 0.0, 2.0) as usize);
    let sizes: Vec<usize> = (0..m).map(|_| 1 + (rng::uniform(&mut r, 0.0, 2.0) as usize)).collect();
    let l: usize = sizes.iter().sum();
    let mut at = 0;
    let mut terms = Vec::new();
    for &s in &sizes {
        let coords: Vec<usize> = (at..at + s).collect();
        at += s;
        terms.push((0..2).map(|_| form_on(n, l, n_x, &coords, &mut r)).collect());
    }
    let base = det_form(n, l, n_x, &mut r);
    SumOfMaxProblem::new(n, n_x, UncertaintySet::unit_box(l), base, terms, boxed(n_x)).unwrap()
}

/// `Σᵢ |αᵢ(x) + βᵢ(x)ζᵢ|` over a zero-centered box, ball or budgeted set.
pub fn abs_instance(seed: u64) -> SumOfMaxProblem {
    let mut r = rng::seeded(seed);
    let n_x = 2;
    let n = n_x + 1;
    let l = 2 + (rng::uniform(&mut r, 0.0, 3.0) as usize);
    let set = match seed % 3 {
        0 => UncertaintySet::Box { center: vec![0.0; l], radius: rng::uniform(&mut r, 0.1, 1.0) },
        1 => UncertaintySet::ellipsoid(vec![0.0; l], rng::uniform(&mut r, 0.1, 1.0)),
        _ => UncertaintySet::Budgeted { budgets: (0..l).map(|k| (k + 1) as f64 * 0.6).collect() },
    };
    let terms = (0..l)
        .map(|i| {
            let f = form_on(n, l, n_x, &[i], &mut r);
            vec![f.clone(), f.scaled(-1.0)]
        })
        .collect();
    let base = det_form(n, l, n_x, &mut r);
    SumOfMaxProblem::new(n, n_x, set, base, terms, boxed(n_x)).unwrap()
}

/// Terms `αᵢ(ζ) + βᵢ(ζ)·ℓᵢⱼ(x)` over a box, returned with the factors.
pub fn common_factor_instance(seed: u64) -> (SumOfMaxProblem, Vec<Affine>, Vec<Affine>) {
    let mut r = rng::seeded(seed);
    let n_x = 2;
    let n = n_x + 1;
    let l = 2;
    let m = 2 + (rng::uniform(&mut r, 0.0, 2.0) as usize);
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut terms = Vec::new();
    for i in 0..m {
        let alpha = Affine::new(u(&mut r), (0..l).map(|_| u(&mut r)).collect());
        // Every other term gets a sign-indefinite factor.
        let c0 = if i % 2 == 0 { 3.0 } else { 0.2 };
        let beta = Affine::new(c0, (0..l).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect());
        let mut pieces = Vec::new();
        for _ in 0..2 {
            let c = u(&mut r);
            let g: Vec<f64> = (0..n).map(|j| if j == n_x { 0.0 } else { u(&mut r) }).collect();
            let mut f = BiaffineForm::zeros(n, l);
            f.set_constant(alpha.constant + beta.constant * c);
            for (j, v) in g.iter().enumerate() {
                f.set_x(j, beta.constant * v);
            }
            for k in 0..l {
                f.set_zeta(k, alpha.coef[k] + beta.coef[k] * c);
                for (j, v) in g.iter().enumerate() {
                    f.set_cross(k, j, beta.coef[k] * v);
                }
            }
            pieces.push(f);
        }
        terms.push(pieces);
        alphas.push(alpha);
        betas.push(beta);
    }
    let base = det_form(n, l, n_x, &mut r);
    let p = SumOfMaxProblem::new(n, n_x, UncertaintySet::unit_box(l), base, terms, boxed(n_x)).unwrap();
    (p, alphas, betas)
}

/// Triaffine constraint: box ζ¹ of dimension ≤ 4, V-polytope ζ² with ≤ 5
/// vertices. Returns the box too.
pub fn triaffine_instance(seed: u64) -> (Triaffine, UncertaintySet) {
    let mut r = rng::seeded(seed);
    let n_x = 2;
    let n = n_x + 1;
    let k1 = 1 + (rng::uniform(&mut r, 0.0, 4.0) as usize);
    let l2 = 1 + (rng::uniform(&mut r, 0.0, 2.0) as usize);
    let nv = (l2 + 1 + (rng::uniform(&mut r, 0.0, 3.0) as usize)).min(5);
    let vertices = (0..nv).map(|_| (0..l2).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect()).collect();
    let set = UncertaintySet::VPolytope { vertices };
    let all: Vec<usize> = (0..l2).collect();
    let base = form_on(n, l2, n_x, &all, &mut r);
    let factors = (0..k1).map(|_| form_on(n, l2, n_x, &all, &mut r)).collect();
    let center = (0..k1).map(|_| rng::uniform(&mut r, -1.0, 1.0)).collect();
    let first = UncertaintySet::Box { center, radius: rng::uniform(&mut r, 0.1, 1.0) };
    (Triaffine { n_x: n, d_index: n_x, set, base, factors, side_constraints: boxed(n_x) }, first)
}

/// `min d` subject to the triaffine row at every pair of vertices.
pub fn triaffine_brute_force(t: &Triaffine, first: &UncertaintySet) -> f64 {
    let v1 = first.vertices(1 << 10).unwrap();
    let v2 = t.set.vertices(100).unwrap();
    let n = t.n_x;
    let mut c = vec![0.0; n];
    c[t.d_index] = 1.0;
    let mut lp = LinearProgram::new(c);
    for j in 0..n {
        lp.lower[j] = f64::NEG_INFINITY;
    }
    for s in &t.side_constraints {
        if let SideConstraint::Bound { var, lower, upper } = s {
            lp.lower[*var] = lower.unwrap_or(f64::NEG_INFINITY);
            lp.upper[*var] = upper.unwrap_or(f64::INFINITY);
        }
    }
    for a in &v1 {
        for b in &v2 {
            // The row is affine in x; read it off from n + 1 evaluations.
            let zero = vec![0.0; n];
            let c0 = t.eval(a, b, &zero);
            let mut row: Vec<f64> = (0..n)
                .map(|j| {
                    let mut e = zero.clone();
                    e[j] = 1.0;
                    t.eval(a, b, &e) - c0
                })
                .collect();
            row[t.d_index] -= 1.0;
            lp = lp.le(row, -c0);
        }
    }
    let res = solve_lp(&lp).unwrap();
    assert_eq!(res.status, LpStatus::Optimal);
    res.value
}

/// Random small LP `min cᵀv, Av ≤ b, 0 ≤ v ≤ u`.
pub fn random_lp(seed: u64) -> LinearProgram {
    let mut r = rng::seeded(seed);
    let n = 2 + (rng::uniform(&mut r, 0.0, 3.0) as usize);
    let m = 1 + (rng::uniform(&mut r, 0.0, 4.0) as usize);
    let c = (0..n).map(|_| rng::uniform(&mut r, -5.0, 5.0)).collect();
    let mut lp = LinearProgram::new(c);
    for j in 0..n {
        lp.upper[j] = rng::uniform(&mut r, 1.0, 10.0);
    }
    for _ in 0..m {
        let row = (0..n).map(|_| rng::uniform(&mut r, -5.0, 5.0)).collect();
        lp = lp.le(row, rng::uniform(&mut r, -2.0, 10.0));
    }
    lp
}

/// Optimum over basic feasible points of `Av ≤ b, 0 ≤ v ≤ u`, found by
/// solving every n × n subsystem of active constraints. `None` when
/// infeasible.
pub fn lp_brute_force(lp: &LinearProgram) -> Option<f64> {
    let n = lp.n();
    // Constraints as (row, rhs) meaning row·v ≤ rhs.
    let mut cons: Vec<(Vec<f64>, f64)> = lp.a.iter().cloned().zip(lp.b.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cons.push((e.clone(), lp.upper[j]));
        e[j] = -1.0;
        cons.push((e, -lp.lower[j]));
    }
    let k = cons.len();
    let mut best: Option<f64> = None;
    let mut pick = vec![0usize; n];
    fn next(pick: &mut [usize], k: usize) -> bool {
        let n = pick.len();
        let mut i = n;
        while i > 0 {
            i -= 1;
            if pick[i] < k - n + i {
                pick[i] += 1;
                for j in i + 1..n {
                    pick[j] = pick[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for (i, p) in pick.iter_mut().enumerate() {
        *p = i;
    }
    loop {
        let mut m: Vec<Vec<f64>> = pick.iter().map(|&i| cons[i].0.clone()).collect();
        let mut rhs: Vec<f64> = pick.iter().map(|&i| cons[i].1).collect();
        if let Some(v) = gauss(&mut m, &mut rhs) {
            let feasible = cons.iter().all(|(row, b)| row.iter().zip(&v).map(|(a, x)| a * x).sum::<f64>() <= b + 1e-9);
            if feasible {
                let obj: f64 = lp.c.iter().zip(&v).map(|(a, x)| a * x).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        if !next(&mut pick, k) {
            break;
        }
    }
    best
}

fn gauss(m: &mut [Vec<f64>], rhs: &mut [f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let p = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[p][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, p);
        rhs.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// Closed-form regression worst case minimized over (β₀, β₁). For fixed β₁
/// the best β₀ is a median of `yᵢ − β₁xᵢ`, and the resulting profile is
/// convex in β₁, so a ternary search finishes the job.
pub fn regression_closed_form_min(data: &rosom::problems::Regression) -> f64 {
    let profile = |b1: f64| {
        let mut r: Vec<f64> = data.x.iter().zip(&data.y).map(|(x, y)| y - b1 * x).collect();
        r.sort_by(f64::total_cmp);
        data.worst_case(r[r.len() / 2], b1)
    };
    let (mut lo, mut hi) = (-100.0, 100.0);
    for _ in 0..300 {
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if profile(a) < profile(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    profile(0.5 * (lo + hi))
}
