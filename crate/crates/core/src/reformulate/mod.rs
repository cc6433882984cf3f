//! Formulations of a sum-of-maxima problem as LPs with robust rows.
//!
//! Every function returns a [`RobustLp`] whose first `n_x` variables are the
//! original decisions and whose objective is `d`. Rows that turn out not to
//! depend on ζ are emitted as plain linear rows.

mod scenario;
mod special;

pub use scenario::scenario_formulation;
pub use special::{
    biaffine_reduce, special_centrosymmetric_abs, special_common_factor, special_product_sets, BlockMap, Triaffine,
};

use crate::error::{Error, Result};
use crate::linsolve::RowKind;
use crate::model::{Affine, BiaffineForm, SumOfMaxProblem};
use crate::robust_lp::{RobustLp, VarOrigin};

/// Default limit on the number of rows EORLC and sum splitting may emit.
pub const ROW_CAP: usize = 100_000;
/// Default limit on the number of vertices vertex enumeration may use.
pub const VERTEX_CAP: usize = 100_000;

/// `f` over `n` variables plus the listed extra coefficients.
pub(crate) fn lift(f: &BiaffineForm, n: usize, extra: &[(usize, f64)]) -> BiaffineForm {
    let mut g = f.widen(n);
    for &(k, v) in extra {
        g.add_x(k, v);
    }
    g
}

/// Adds `f ≤ 0` over region `region`, as a linear row when `f` is ζ-free.
pub(crate) fn push_in(r: &mut RobustLp, f: BiaffineForm, region: usize) {
    if f.is_zeta_free() {
        let coefs = f.x_linear().iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, v)| (k, *v)).collect();
        r.add_row(coefs, RowKind::Le, -f.constant());
    } else {
        r.add_robust_in(f, region);
    }
}

pub(crate) fn push(r: &mut RobustLp, f: BiaffineForm) {
    push_in(r, f, 0);
}

/// Adds the affine row `a(v) + Σ extra ≤ 0` (ζ already fixed).
pub(crate) fn push_fixed(r: &mut RobustLp, a: &Affine, extra: &[(usize, f64)]) {
    let mut coefs: Vec<(usize, f64)> =
        a.coef.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, v)| (k, *v)).collect();
    coefs.extend_from_slice(extra);
    r.add_row(coefs, RowKind::Le, -a.constant);
}

/// Decisions with their bounds and the robust side constraints.
pub(crate) fn start(p: &SumOfMaxProblem) -> RobustLp {
    let (lo, hi) = p.var_bounds();
    let mut r = RobustLp::new(p.n_x, p.d_index, &lo, &hi, p.set.clone());
    for f in p.robust_side_rows() {
        push(&mut r, f.clone());
    }
    r
}

/// Like [`start`] but with the side constraints enforced only at `points`.
fn start_at(p: &SumOfMaxProblem, points: &[Vec<f64>]) -> RobustLp {
    let (lo, hi) = p.var_bounds();
    let mut r = RobustLp::new(p.n_x, p.d_index, &lo, &hi, p.set.clone());
    for f in p.robust_side_rows() {
        for z in points {
            push_fixed(&mut r, &f.at_zeta(z), &[]);
        }
    }
    r
}

/// The problem at the nominal scenario only.
pub fn nominal(p: &SumOfMaxProblem) -> RobustLp {
    let z = p.set.nominal();
    let mut r = start_at(p, std::slice::from_ref(&z));
    add_vertex_block(&mut r, p, &z, 0);
    r
}

/// Epigraph rows of the problem at a fixed ζ: `yᵢ ≥ ℓᵢⱼ(ζ,x)` and
/// `ℓ(ζ,x) + Σ yᵢ ≤ d`. Terms with one piece enter the top row directly.
pub fn add_vertex_block(r: &mut RobustLp, p: &SumOfMaxProblem, zeta: &[f64], vertex: usize) {
    let mut top = p.base.at_zeta(zeta);
    let mut extra = vec![(p.d_index, -1.0)];
    for (i, t) in p.terms.iter().enumerate() {
        if t.len() == 1 {
            top.add_assign(&t[0].at_zeta(zeta));
            continue;
        }
        let y = r.add_free(VarOrigin::VertexY { vertex, term: i });
        for f in t {
            push_fixed(r, &f.at_zeta(zeta), &[(y, -1.0)]);
        }
        extra.push((y, 1.0));
    }
    push_fixed(r, &top, &extra);
}

/// RC of the epigraph reformulation: one analysis variable per term.
pub fn rcr(p: &SumOfMaxProblem) -> RobustLp {
    let mut r = start(p);
    let ys: Vec<usize> = (0..p.terms.len()).map(|i| r.add_free(VarOrigin::Y(i))).collect();
    let n = r.n_vars();
    let mut extra = vec![(p.d_index, -1.0)];
    extra.extend(ys.iter().map(|&y| (y, 1.0)));
    push(&mut r, lift(&p.base, n, &extra));
    for (t, &y) in p.terms.iter().zip(&ys) {
        for f in t {
            push(&mut r, lift(f, n, &[(y, -1.0)]));
        }
    }
    r.exact = p.terms.len() == 1 && p.base.is_zeta_free();
    r
}

/// `v + wᵀζ` as a form over `n` variables.
fn decision_rule(n: usize, l: usize, v: usize, w: &[usize], sign: f64) -> BiaffineForm {
    let mut f = BiaffineForm::zeros(n, l);
    f.set_x(v, sign);
    for (c, &k) in w.iter().enumerate() {
        f.set_cross(c, k, sign);
    }
    f
}

/// Affinely adjustable RC: `yᵢ = vᵢ + wᵢᵀζ` over the full ζ.
pub fn aarcr(p: &SumOfMaxProblem) -> RobustLp {
    let mut r = start(p);
    let l = p.dim_zeta();
    let mut rules = Vec::new();
    for i in 0..p.terms.len() {
        let v = r.add_free(VarOrigin::V(i));
        let w: Vec<usize> = (0..l).map(|c| r.add_free(VarOrigin::W { term: i, coord: c })).collect();
        rules.push((v, w));
    }
    let n = r.n_vars();
    let mut top = lift(&p.base, n, &[(p.d_index, -1.0)]);
    for (v, w) in &rules {
        top.add_scaled(&decision_rule(n, l, *v, w, 1.0), 1.0);
    }
    push(&mut r, top);
    for (t, (v, w)) in p.terms.iter().zip(&rules) {
        let rule = decision_rule(n, l, *v, w, -1.0);
        for f in t {
            let mut row = f.widen(n);
            row.add_scaled(&rule, 1.0);
            push(&mut r, row);
        }
    }
    r.exact = p.terms.len() == 1 && p.base.is_zeta_free();
    r
}

fn flat(f: &BiaffineForm) -> Vec<f64> {
    let mut v = vec![f.constant()];
    v.extend_from_slice(f.x_linear());
    v.extend_from_slice(f.zeta_linear());
    for row in f.cross_rows() {
        v.extend(row);
    }
    v
}

/// `s > 0` with `g = −s·f`, if one exists.
fn opposite_multiple(f: &BiaffineForm, g: &BiaffineForm) -> Option<f64> {
    let (a, b) = (flat(f), flat(g));
    let ff: f64 = a.iter().map(|v| v * v).sum();
    if ff == 0.0 {
        return None;
    }
    let s = -a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / ff;
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let close = a.iter().zip(&b).all(|(x, y)| (y + s * x).abs() <= 1e-12 * scale);
    (s > 0.0 && close).then_some(s)
}

/// The nonzero piece of a term `max{0, f}`.
fn hinge(t: &[BiaffineForm]) -> Option<&BiaffineForm> {
    if t.len() != 2 {
        return None;
    }
    match (t[0].max_abs_coef() == 0.0, t[1].max_abs_coef() == 0.0) {
        (true, false) => Some(&t[1]),
        (false, true) => Some(&t[0]),
        _ => None,
    }
}

/// Merges pairs `max{0, f} + max{0, −s f}` into `max{f, −s f}`.
fn merge_hinges(terms: &[Vec<BiaffineForm>]) -> Vec<Vec<BiaffineForm>> {
    let mut used = vec![false; terms.len()];
    let mut out = Vec::with_capacity(terms.len());
    for i in 0..terms.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if let Some(f) = hinge(&terms[i]) {
            let partner = (i + 1..terms.len())
                .find(|&k| !used[k] && hinge(&terms[k]).is_some_and(|g| opposite_multiple(f, g).is_some()));
            if let Some(k) = partner {
                used[k] = true;
                out.push(vec![f.clone(), hinge(&terms[k]).unwrap().clone()]);
                continue;
            }
        }
        out.push(terms[i].clone());
    }
    out
}

/// Both preprocessing steps of EORLC. Terms with several ζ-free pieces get a
/// variable `tᵢ ≥` each of them, which then stands in for those pieces. The
/// returned terms are over `r.n_vars()` variables.
fn preprocess(p: &SumOfMaxProblem, r: &mut RobustLp) -> Vec<Vec<BiaffineForm>> {
    let merged = merge_hinges(&p.terms);
    let mut out = Vec::with_capacity(merged.len());
    let mut pending = Vec::new();
    for (i, t) in merged.into_iter().enumerate() {
        let free: Vec<&BiaffineForm> = t.iter().filter(|f| f.is_zeta_free()).collect();
        if free.len() < 2 {
            out.push(t);
            continue;
        }
        let v = r.add_free(VarOrigin::Collapsed(i));
        for f in free {
            pending.push((f.clone(), v));
        }
        let mut kept: Vec<BiaffineForm> = t.into_iter().filter(|f| !f.is_zeta_free()).collect();
        let mut tv = BiaffineForm::zeros(v + 1, p.dim_zeta());
        tv.set_x(v, 1.0);
        kept.push(tv);
        out.push(kept);
    }
    let n = r.n_vars();
    for (f, v) in pending {
        push(r, lift(&f, n, &[(v, -1.0)]));
    }
    out.into_iter().map(|t| t.into_iter().map(|f| f.widen(n)).collect()).collect()
}

fn product_count(terms: &[Vec<BiaffineForm>], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| terms[i].len() as f64).product()
}

/// Calls `emit` with `Σ_{i∈idx} terms[i][j(i)]` for every assignment, in
/// lexicographic order (last term fastest).
fn for_each_assignment(terms: &[Vec<BiaffineForm>], idx: &[usize], init: &BiaffineForm, mut emit: impl FnMut(BiaffineForm)) {
    let mut stack = vec![init.clone()];
    let mut choice = vec![0usize; idx.len()];
    let mut depth = 0;
    loop {
        if depth == idx.len() {
            emit(stack[depth].clone());
            loop {
                if depth == 0 {
                    return;
                }
                depth -= 1;
                choice[depth] += 1;
                stack.truncate(depth + 1);
                if choice[depth] < terms[idx[depth]].len() {
                    break;
                }
                choice[depth] = 0;
            }
        }
        let mut next = stack[depth].clone();
        next.add_scaled(&terms[idx[depth]][choice[depth]], 1.0);
        stack.push(next);
        depth += 1;
    }
}

/// Enumeration of robust linear constraints: one robust row per assignment
/// of a piece to every term, after preprocessing.
pub fn eorlc(p: &SumOfMaxProblem) -> Result<RobustLp> {
    eorlc_with_cap(p, ROW_CAP)
}

pub fn eorlc_with_cap(p: &SumOfMaxProblem, cap: usize) -> Result<RobustLp> {
    let mut r = start(p);
    let terms = preprocess(p, &mut r);
    let idx: Vec<usize> = (0..terms.len()).collect();
    let count = product_count(&terms, &idx);
    if count > cap as f64 {
        return Err(Error::CapExceeded { count, cap });
    }
    let n = r.n_vars();
    let init = lift(&p.base, n, &[(p.d_index, -1.0)]);
    let mut rows = Vec::with_capacity(count as usize);
    for_each_assignment(&terms, &idx, &init, |f| rows.push(f));
    for f in rows {
        push(&mut r, f);
    }
    r.exact = true;
    Ok(r)
}

/// Epigraph rows at every vertex of the set (a plain LP).
pub fn vertex_enumeration(p: &SumOfMaxProblem) -> Result<RobustLp> {
    vertex_enumeration_with_cap(p, VERTEX_CAP)
}

pub fn vertex_enumeration_with_cap(p: &SumOfMaxProblem, cap: usize) -> Result<RobustLp> {
    let verts = p.set.vertices(cap)?;
    let mut r = start_at(p, &verts);
    for (k, z) in verts.iter().enumerate() {
        add_vertex_block(&mut r, p, z, k);
    }
    r.exact = true;
    Ok(r)
}

/// `k` consecutive groups of near-equal size covering `0..n` (earlier
/// groups take the remainder).
pub fn consecutive_groups(n: usize, k: usize) -> Vec<Vec<usize>> {
    let k = k.clamp(1, n.max(1));
    let (q, rem) = (n / k, n % k);
    let mut out = Vec::with_capacity(k);
    let mut at = 0;
    for g in 0..k {
        let size = q + usize::from(g < rem);
        out.push((at..at + size).collect());
        at += size;
    }
    out
}

/// Sum splitting: one analysis variable per group, each bounding the exact
/// merged maximum of its terms. With `adjustable`, the group variables are
/// affine in ζ.
pub fn sum_split(p: &SumOfMaxProblem, groups: &[Vec<usize>], adjustable: bool) -> Result<RobustLp> {
    let n_terms = p.terms.len();
    let mut seen = vec![false; n_terms];
    for g in groups {
        if g.is_empty() {
            return Err(Error::Invalid("empty group in partition".into()));
        }
        for &i in g {
            if i >= n_terms || seen[i] {
                return Err(Error::Invalid(format!("term {i} is out of range or in two groups")));
            }
            seen[i] = true;
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Invalid(format!("term {i} is in no group")));
    }
    for g in groups {
        let count = product_count(&p.terms, g);
        if count > ROW_CAP as f64 {
            return Err(Error::CapExceeded { count, cap: ROW_CAP });
        }
    }
    let l = p.dim_zeta();
    let mut r = start(p);
    let mut rules = Vec::new();
    for gi in 0..groups.len() {
        let v = r.add_free(VarOrigin::Group(gi));
        let w: Vec<usize> = if adjustable {
            (0..l).map(|c| r.add_free(VarOrigin::GroupW { group: gi, coord: c })).collect()
        } else {
            Vec::new()
        };
        rules.push((v, w));
    }
    let n = r.n_vars();
    let mut top = lift(&p.base, n, &[(p.d_index, -1.0)]);
    for (v, w) in &rules {
        top.add_scaled(&decision_rule(n, l, *v, w, 1.0), 1.0);
    }
    push(&mut r, top);
    let terms: Vec<Vec<BiaffineForm>> = p.terms.iter().map(|t| t.iter().map(|f| f.widen(n)).collect()).collect();
    for (g, (v, w)) in groups.iter().zip(&rules) {
        let init = decision_rule(n, l, *v, w, -1.0);
        let mut rows = Vec::new();
        for_each_assignment(&terms, g, &init, |f| rows.push(f));
        for f in rows {
            push(&mut r, f);
        }
    }
    r.exact = groups.len() == 1 && p.base.is_zeta_free();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UncertaintySet;
    use crate::robust_lp::{dualize, solve, SolveStatus};
    use crate::SideConstraint;

    fn f(c: f64, x: [f64; 2], z: f64) -> BiaffineForm {
        BiaffineForm::from_parts(c, x.to_vec(), vec![z], vec![vec![0.0, 0.0]]).unwrap()
    }

    /// `d ≥ max{x, x+ζ} + max{x, x−ζ}`, variables (x, d).
    fn toy1() -> SumOfMaxProblem {
        let lo = SideConstraint::Bound { var: 0, lower: Some(0.0), upper: None };
        SumOfMaxProblem::new(
            2,
            1,
            UncertaintySet::unit_box(1),
            BiaffineForm::zeros(2, 1),
            vec![
                vec![f(0.0, [1.0, 0.0], 0.0), f(0.0, [1.0, 0.0], 1.0)],
                vec![f(0.0, [1.0, 0.0], 0.0), f(0.0, [1.0, 0.0], -1.0)],
            ],
            vec![lo],
        )
        .unwrap()
    }

    fn value(r: &RobustLp) -> f64 {
        let s = solve(r).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        s.value
    }

    #[test]
    fn toy1_values() {
        let p = toy1();
        assert!((value(&rcr(&p)) - 2.0).abs() < 1e-9);
        assert!((value(&aarcr(&p)) - 1.0).abs() < 1e-9);
        let e = eorlc(&p).unwrap();
        // Two of the four rows are ζ-free.
        assert_eq!((e.robust.len(), e.rows.len()), (2, 2));
        assert!((value(&e) - 1.0).abs() < 1e-9);
        assert!((value(&vertex_enumeration(&p).unwrap()) - 1.0).abs() < 1e-9);
        assert!((value(&dualize(&rcr(&p)).unwrap()) - 2.0).abs() < 1e-9);
        assert!((value(&nominal(&p)) - 0.0).abs() < 1e-9);
    }

    #[test]
    fn singleton_split_is_rcr() {
        let p = toy1();
        let s = sum_split(&p, &consecutive_groups(2, 2), false).unwrap();
        assert!((value(&s) - 2.0).abs() < 1e-9);
        let one = sum_split(&p, &consecutive_groups(2, 1), false).unwrap();
        assert!(one.exact);
        assert!((value(&one) - 1.0).abs() < 1e-9);
        assert!(sum_split(&p, &[vec![0]], false).is_err());
        assert!(sum_split(&p, &[vec![0, 1], vec![1]], false).is_err());
    }

    #[test]
    fn collapse_halves_rows() {
        // max{x, 2x, ζ} + max{x, x−ζ}: the two ζ-free pieces of term 0 merge.
        let p = SumOfMaxProblem::new(
            2,
            1,
            UncertaintySet::unit_box(1),
            BiaffineForm::zeros(2, 1),
            vec![
                vec![f(0.0, [1.0, 0.0], 0.0), f(0.0, [2.0, 0.0], 0.0), f(0.0, [0.0, 0.0], 1.0)],
                vec![f(0.0, [1.0, 0.0], 0.0), f(0.0, [1.0, 0.0], -1.0)],
            ],
            vec![],
        )
        .unwrap();
        let e = eorlc(&p).unwrap();
        // 2 collapse rows plus 2 × 2 assignment rows.
        assert_eq!(e.robust.len() + e.rows.len(), 6);
        assert_eq!(e.find_vars(|o| matches!(o, VarOrigin::Collapsed(_))).len(), 1);
        let v = value(&vertex_enumeration(&p).unwrap());
        assert!((value(&e) - v).abs() < 1e-9);
    }

    #[test]
    fn hinge_pairs_merge() {
        // 1·max{0, x−ζ} + 2·max{0, ζ−x} becomes max{x−ζ, 2ζ−2x}.
        let p = SumOfMaxProblem::new(
            2,
            1,
            UncertaintySet::unit_box(1),
            BiaffineForm::zeros(2, 1),
            vec![
                vec![BiaffineForm::zeros(2, 1), f(0.0, [1.0, 0.0], -1.0)],
                vec![f(0.0, [-2.0, 0.0], 2.0), BiaffineForm::zeros(2, 1)],
            ],
            vec![],
        )
        .unwrap();
        let e = eorlc(&p).unwrap();
        assert_eq!(e.robust.len(), 2);
        let v = value(&vertex_enumeration(&p).unwrap());
        assert!((value(&e) - v).abs() < 1e-9);
        // max{x + 1, 2 − 2x} is smallest at x = 1/3.
        assert!((v - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn vertex_enumeration_rejects_ellipsoid() {
        let p = toy1().with_set(UncertaintySet::ellipsoid(vec![0.0], 1.0)).unwrap();
        assert!(matches!(vertex_enumeration(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn groups_are_consecutive() {
        assert_eq!(consecutive_groups(5, 2), vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(consecutive_groups(2, 5).len(), 2);
    }
}
