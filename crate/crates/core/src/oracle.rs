//! Worst-case computations over uncertainty sets.

use std::time::Duration;

use crate::error::{Error, Result};
use crate::linsolve::{solve_milp, LinearProgram, Milp, MilpOptions, MilpStatus};
use crate::model::{dot, Affine, SumOfMaxProblem, UncertaintySet};

/// Default number of assignments `Πᵢ|Jᵢ|` the enumeration oracle accepts.
pub const ENUM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    pub value: f64,
    pub zeta: Vec<f64>,
    /// Maximizing piece per term (empty for plain affine maximization).
    pub assignment: Vec<usize>,
    /// False when the search stopped early (threshold reached or time out).
    pub optimal: bool,
}

/// Exact maximizer of `c0 + c·ζ` over the set.
pub fn max_affine(set: &UncertaintySet, c: &[f64], c0: f64) -> Result<WorstCase> {
    let l = set.dim();
    if c.len() != l {
        return Err(Error::Dimension(format!("objective has {} entries for a set of dimension {l}", c.len())));
    }
    let zeta = match set {
        UncertaintySet::Box { center, radius } => center
            .iter()
            .zip(c)
            .map(|(m, ci)| if *ci >= 0.0 { m + radius } else { m - radius })
            .collect(),
        UncertaintySet::Ellipsoid { center, radius } => {
            let n = dot(c, c).sqrt();
            if n == 0.0 {
                center.clone()
            } else {
                center.iter().zip(c).map(|(m, ci)| m + radius * ci / n).collect()
            }
        }
        UncertaintySet::TruncatedEllipsoid { center, radius } => truncated_ellipsoid_argmax(center, *radius, c),
        UncertaintySet::VPolytope { vertices } => {
            let mut best = 0;
            let mut best_v = f64::NEG_INFINITY;
            for (k, v) in vertices.iter().enumerate() {
                let val = dot(c, v);
                if val > best_v {
                    best_v = val;
                    best = k;
                }
            }
            vertices[best].clone()
        }
        UncertaintySet::SimplexProduct { blocks } => {
            let mut z = vec![0.0; l];
            let mut at = 0;
            for &k in blocks {
                let mut best = at;
                for i in at..at + k {
                    if c[i] > c[best] {
                        best = i;
                    }
                }
                z[best] = 1.0;
                at += k;
            }
            z
        }
        UncertaintySet::HPolytope { .. } | UncertaintySet::Budgeted { .. } => set.linear_repr()?.lp_max(c)?.1,
    };
    Ok(WorstCase { value: c0 + dot(c, &zeta), zeta, assignment: Vec::new(), optimal: true })
}

/// `argmax c·ζ` over `{ζ ≥ 0, ‖ζ − center‖ ≤ radius}` by bisection on the
/// multiplier μ of the norm constraint, `ζᵢ(μ) = max(0, centerᵢ + cᵢ/(2μ))`.
fn truncated_ellipsoid_argmax(center: &[f64], radius: f64, c: &[f64]) -> Vec<f64> {
    let at = |mu: f64| -> Vec<f64> {
        center.iter().zip(c).map(|(m, ci)| (m + ci / (2.0 * mu)).max(0.0)).collect()
    };
    let dist = |z: &[f64]| z.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if radius == 0.0 || c.iter().all(|v| *v == 0.0) {
        return center.to_vec();
    }
    if c.iter().all(|v| *v <= 0.0) {
        // μ → 0⁺ limit: coordinates with cᵢ < 0 go to zero, the rest stay.
        let lim: Vec<f64> = center.iter().zip(c).map(|(m, ci)| if *ci < 0.0 { 0.0 } else { *m }).collect();
        if dist(&lim) <= radius {
            return lim;
        }
    }
    let mut hi = 1.0;
    while dist(&at(hi)) > radius {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while dist(&at(lo)) <= radius {
        lo /= 2.0;
        if lo < 1e-300 {
            return at(hi);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g = dist(&at(mid));
        if g > radius {
            lo = mid;
        } else {
            hi = mid;
            if radius - g <= 1e-9 * radius.max(1.0) {
                break;
            }
        }
    }
    at(hi)
}

/// Returns the maximizer when `row(ζ) > rhs + tol` for some ζ in the set.
pub fn violated_scenario(set: &UncertaintySet, row: &Affine, rhs: f64, tol: f64) -> Result<Option<Vec<f64>>> {
    let wc = max_affine(set, &row.coef, row.constant)?;
    Ok((wc.value > rhs + tol).then_some(wc.zeta))
}

fn check_x(p: &SumOfMaxProblem, x: &[f64]) -> Result<()> {
    if x.len() != p.n_x {
        return Err(Error::Dimension(format!("x has length {}, expected {}", x.len(), p.n_x)));
    }
    Ok(())
}

fn assignment_at(p: &SumOfMaxProblem, zeta: &[f64], x: &[f64]) -> Vec<usize> {
    p.terms
        .iter()
        .map(|t| {
            let mut best = 0;
            let mut bv = f64::NEG_INFINITY;
            for (j, f) in t.iter().enumerate() {
                let v = f.eval(zeta, x);
                if v > bv {
                    bv = v;
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// True robust value by enumerating every assignment of a maximizing piece
/// to each term.
pub fn true_value_enum(p: &SumOfMaxProblem, x: &[f64]) -> Result<WorstCase> {
    true_value_enum_with(p, x, ENUM_CAP, None)
}

/// Enumeration with an explicit cap; with `stop_above` the search returns
/// the first assignment whose worst case exceeds it (flagged non-optimal).
pub fn true_value_enum_with(
    p: &SumOfMaxProblem,
    x: &[f64],
    cap: usize,
    stop_above: Option<f64>,
) -> Result<WorstCase> {
    check_x(p, x)?;
    let count = p.assignment_count();
    if count > cap as f64 {
        return Err(Error::CapExceeded { count, cap });
    }
    let pieces: Vec<Vec<Affine>> = p.terms.iter().map(|t| t.iter().map(|f| f.at_x(x)).collect()).collect();
    let n_terms = pieces.len();
    // prefix[k] = base + chosen pieces of terms < k
    let mut prefix = vec![p.base.at_x(x); n_terms + 1];
    let mut choice = vec![0usize; n_terms];
    let mut best: Option<WorstCase> = None;
    let mut depth = 0usize;
    loop {
        // Descend with current choices, filling prefixes.
        while depth < n_terms {
            let mut next = prefix[depth].clone();
            next.add_assign(&pieces[depth][choice[depth]]);
            prefix[depth + 1] = next;
            depth += 1;
        }
        let leaf = &prefix[n_terms];
        let wc = max_affine(&p.set, &leaf.coef, leaf.constant)?;
        if best.as_ref().is_none_or(|b| wc.value > b.value) {
            let stop = stop_above.is_some_and(|t| wc.value > t);
            best = Some(WorstCase { assignment: choice.clone(), optimal: !stop, ..wc });
            if stop {
                break;
            }
        }
        // Advance to the next assignment (lexicographic).
        let mut k = n_terms;
        loop {
            if k == 0 {
                let b = best.expect("at least one assignment");
                return Ok(finish(p, x, b));
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < pieces[k].len() {
                break;
            }
            choice[k] = 0;
        }
        depth = k;
    }
    Ok(finish(p, x, best.expect("at least one assignment")))
}

fn finish(p: &SumOfMaxProblem, x: &[f64], mut wc: WorstCase) -> WorstCase {
    // Report the function value at ζ* and the pieces actually attaining it.
    wc.value = p.lhs(&wc.zeta, x).max(wc.value);
    wc.assignment = assignment_at(p, &wc.zeta, x);
    wc
}

/// Interval upper bound of an affine function over a box.
fn interval_max(f: &Affine, lo: &[f64], hi: &[f64]) -> f64 {
    f.constant + f.coef.iter().zip(lo.iter().zip(hi)).map(|(c, (l, h))| (c * l).max(c * h)).sum::<f64>()
}

/// True robust value as the big-M mixed-integer program over (ζ, t, z):
/// `max ℓ(ζ) + Σ tᵢ,  tᵢ ≤ ℓᵢⱼ(ζ) + Mᵢⱼ(1 − zᵢⱼ),  Σⱼ zᵢⱼ = 1`.
pub fn true_value_milp(p: &SumOfMaxProblem, x: &[f64], stop_above: Option<f64>) -> Result<WorstCase> {
    true_value_milp_with(p, x, stop_above, Some(Duration::from_secs(60)))
}

pub fn true_value_milp_with(
    p: &SumOfMaxProblem,
    x: &[f64],
    stop_above: Option<f64>,
    time_limit: Option<Duration>,
) -> Result<WorstCase> {
    check_x(p, x)?;
    let repr = p.set.linear_repr().map_err(|_| {
        Error::Unsupported(format!("MILP oracle needs a polyhedral set, got {}; use enumeration", p.set.kind_name()))
    })?;
    let (lo, hi) = p.set.bounding_box()?;
    let pieces: Vec<Vec<Affine>> = p.terms.iter().map(|t| t.iter().map(|f| f.at_x(x)).collect()).collect();
    let base = p.base.at_x(x);

    let ne = repr.n_eta;
    let n_terms = pieces.len();
    let t0 = ne;
    let z0 = ne + n_terms;
    let mut z_index = Vec::with_capacity(n_terms);
    let mut n = z0;
    for t in &pieces {
        z_index.push(n);
        n += t.len();
    }

    // Objective: minimize −(base(ζ) + Σ tᵢ), up to the constant below.
    let shift = base.constant + dot(&base.coef, &repr.offset);
    let mut c = vec![0.0; n];
    for (k, v) in repr.pull_back(&base.coef).into_iter().enumerate() {
        c[k] = -v;
    }
    for i in 0..n_terms {
        c[t0 + i] = -1.0;
    }
    let mut lp = LinearProgram::new(c);
    for k in 0..ne {
        lp.lower[k] = repr.lower[k];
        lp.upper[k] = repr.upper[k];
    }
    for i in 0..n_terms {
        lp.lower[t0 + i] = f64::NEG_INFINITY;
    }
    for (row, rhs) in repr.a.iter().zip(&repr.b) {
        let mut r = row.clone();
        r.resize(n, 0.0);
        lp = lp.le(r, *rhs);
    }
    for (row, rhs) in repr.e.iter().zip(&repr.f) {
        let mut r = row.clone();
        r.resize(n, 0.0);
        lp = lp.eq(r, *rhs);
    }
    let mut binaries = Vec::new();
    for (i, t) in pieces.iter().enumerate() {
        let mut ones = vec![0.0; n];
        for j in 0..t.len() {
            ones[z_index[i] + j] = 1.0;
            binaries.push(z_index[i] + j);
        }
        lp = lp.eq(ones, 1.0);
        for (j, f) in t.iter().enumerate() {
            let big_m = t
                .iter()
                .map(|g| {
                    let mut diff = g.clone();
                    diff.add_assign(&f.scaled(-1.0));
                    interval_max(&diff, &lo, &hi)
                })
                .fold(0.0f64, f64::max)
                + 1.0;
            // tᵢ − bᵀ(offset + map η) + M zᵢⱼ ≤ a + M
            let mut r = vec![0.0; n];
            for (k, v) in repr.pull_back(&f.coef).into_iter().enumerate() {
                r[k] = -v;
            }
            r[t0 + i] = 1.0;
            r[z_index[i] + j] = big_m;
            lp = lp.le(r, f.constant + dot(&f.coef, &repr.offset) + big_m);
        }
    }

    let heuristic = |v: &[f64]| -> Option<(Vec<f64>, f64)> {
        let zeta = repr.zeta(&v[..ne]);
        let mut full = v.to_vec();
        let assignment = assignment_at(p, &zeta, x);
        let mut total = base.eval(&zeta);
        for (i, t) in pieces.iter().enumerate() {
            let vals: Vec<f64> = t.iter().map(|f| f.eval(&zeta)).collect();
            full[t0 + i] = vals[assignment[i]];
            total += vals[assignment[i]];
            for j in 0..t.len() {
                full[z_index[i] + j] = if j == assignment[i] { 1.0 } else { 0.0 };
            }
        }
        Some((full, shift - total))
    };
    let opts = MilpOptions {
        time_limit,
        gap_tol: 1e-9,
        stop_below: stop_above.map(|s| shift - s),
        heuristic: Some(Box::new(heuristic)),
    };
    let r = solve_milp(&Milp { lp, binaries }, opts)?;
    match r.status {
        MilpStatus::Infeasible if r.x.is_empty() => return Err(Error::EmptySet),
        MilpStatus::Unbounded => return Err(Error::Unbounded),
        _ => {}
    }
    let zeta = repr.zeta(&r.x[..ne]);
    let optimal = r.status == MilpStatus::Optimal;
    if !optimal {
        log::info!("MILP oracle stopped early ({:?}) after {} nodes", r.status, r.nodes);
    }
    Ok(finish(p, x, WorstCase { value: shift - r.value, zeta, assignment: Vec::new(), optimal }))
}

/// Closed form for problems whose terms are absolute values `|αᵢ + βᵢᵀζ|`
/// over disjoint ζ-coordinates, with a base function not touching those
/// coordinates and a set symmetric under sign flips of single coordinates:
/// `v = c₀ + Σ|αᵢ| + σ(c + Σ sign(αᵢ) βᵢ)`.
pub fn true_value_abs_separable(p: &SumOfMaxProblem, x: &[f64]) -> Result<Option<WorstCase>> {
    check_x(p, x)?;
    if !abs_separable(p) {
        return Ok(None);
    }
    let base = p.base.at_x(x);
    let mut c = base.coef.clone();
    let mut c0 = base.constant;
    for t in &p.terms {
        let f = t[0].at_x(x);
        let s = if f.constant >= 0.0 { 1.0 } else { -1.0 };
        c0 += f.constant.abs();
        for (a, b) in c.iter_mut().zip(&f.coef) {
            *a += s * b;
        }
    }
    let wc = max_affine(&p.set, &c, c0)?;
    Ok(Some(finish(p, x, wc)))
}

/// Structural test for [`true_value_abs_separable`].
pub fn abs_separable(p: &SumOfMaxProblem) -> bool {
    let symmetric = match &p.set {
        UncertaintySet::Box { center, .. } | UncertaintySet::Ellipsoid { center, .. } => {
            center.iter().all(|v| *v == 0.0)
        }
        UncertaintySet::Budgeted { .. } => true,
        _ => false,
    };
    if !symmetric {
        return false;
    }
    let l = p.dim_zeta();
    let mut used = p.base.zeta_support();
    for t in &p.terms {
        if t.len() != 2 {
            return false;
        }
        let mut sum = t[0].clone();
        sum.add_scaled(&t[1], 1.0);
        if sum.max_abs_coef() != 0.0 {
            return false;
        }
        let s = t[0].zeta_support();
        for k in 0..l {
            if s[k] {
                if used[k] {
                    return false;
                }
                used[k] = true;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Enum,
    Milp,
}

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub kind: OracleKind,
    pub enum_cap: usize,
    pub time_limit: Option<Duration>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { kind: OracleKind::Enum, enum_cap: ENUM_CAP, time_limit: Some(Duration::from_secs(60)) }
    }
}

/// True robust value with automatic fallbacks: the absolute-value closed
/// form when it applies, otherwise the requested oracle, switching to the
/// other one when the requested one cannot handle the instance.
pub fn true_value(p: &SumOfMaxProblem, x: &[f64], opts: &OracleOptions, stop_above: Option<f64>) -> Result<WorstCase> {
    if let Some(wc) = true_value_abs_separable(p, x)? {
        return Ok(wc);
    }
    let fits = p.assignment_count() <= opts.enum_cap as f64;
    let use_milp = match opts.kind {
        OracleKind::Milp => p.set.is_polyhedral() || !fits,
        OracleKind::Enum => !fits,
    };
    if use_milp {
        true_value_milp_with(p, x, stop_above, opts.time_limit)
    } else {
        true_value_enum_with(p, x, opts.enum_cap, stop_above)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn box_sign_rule() {
        let wc = max_affine(&UncertaintySet::unit_box(2), &[1.0, -2.0], 0.0).unwrap();
        assert_eq!(wc.zeta, vec![1.0, -1.0]);
        assert_eq!(wc.value, 3.0);
        let wc = max_affine(&UncertaintySet::unit_box(2), &[0.0, -2.0], 1.0).unwrap();
        assert_eq!(wc.zeta, vec![1.0, -1.0]);
    }

    #[test]
    fn ellipsoid_cauchy_schwarz() {
        let wc = max_affine(&UncertaintySet::ellipsoid(vec![0.0, 0.0], 1.0), &[3.0, 4.0], 0.0).unwrap();
        assert!((wc.value - 5.0).abs() < 1e-12);
        assert!((wc.zeta[0] - 0.6).abs() < 1e-12 && (wc.zeta[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn truncated_ellipsoid_limit_point() {
        // c ≤ 0 and the corner (0, 5) lies inside: the limit is optimal.
        let s = UncertaintySet::TruncatedEllipsoid { center: vec![1.0, 5.0], radius: 2.0 };
        let wc = max_affine(&s, &[-1.0, 0.0], 0.0).unwrap();
        assert_eq!(wc.zeta, vec![0.0, 5.0]);
    }

    #[test]
    fn truncated_ellipsoid_beats_samples() {
        let s = UncertaintySet::TruncatedEllipsoid { center: vec![5.0, 5.0, 5.0], radius: 10.0 };
        let c = [1.0, -1.0, 0.0];
        let wc = max_affine(&s, &c, 0.0).unwrap();
        assert!(s.contains(&wc.zeta, 1e-8));
        let mut r = rng::seeded(1);
        for _ in 0..2000 {
            let z = s.sample(&mut r);
            assert!(dot(&c, &z) <= wc.value + 1e-9);
        }
    }

    #[test]
    fn violated_scenario_cases() {
        let set = UncertaintySet::unit_box(3);
        let row = Affine::new(0.0, vec![1.0, 0.0, 0.0]);
        assert_eq!(violated_scenario(&set, &row, 2.0, 1e-9).unwrap(), None);
        assert_eq!(violated_scenario(&set, &row, 0.5, 1e-9).unwrap(), Some(vec![1.0, 1.0, 1.0]));
    }
}
