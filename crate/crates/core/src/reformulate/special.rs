//! Exact formulations for structured problems, and the reduction of
//! constraints with two uncertain parameters.

use super::{lift, push, push_in, rcr, start};
use crate::error::{Error, Result};
use crate::model::{Affine, BiaffineForm, SideConstraint, SumOfMaxProblem, UncertaintySet};
use crate::oracle::{abs_separable, max_affine};
use crate::robust_lp::{Region, RobustLp, VarOrigin};

/// ζ-coordinate blocks and the block each term lives in.
#[derive(Debug, Clone)]
pub struct BlockMap {
    pub blocks: Vec<Vec<usize>>,
    pub term_block: Vec<usize>,
}

impl BlockMap {
    /// Blocks read off from the supports: one block per ζ-dependent term.
    pub fn from_supports(p: &SumOfMaxProblem) -> Self {
        let mut blocks = Vec::new();
        let mut term_block = Vec::new();
        for t in &p.terms {
            let mut s = vec![false; p.dim_zeta()];
            for f in t {
                for (a, b) in s.iter_mut().zip(f.zeta_support()) {
                    *a |= b;
                }
            }
            term_block.push(blocks.len());
            blocks.push((0..s.len()).filter(|&k| s[k]).collect());
        }
        BlockMap { blocks, term_block }
    }
}

/// Whether the set factors as a product over the given coordinate groups.
fn is_product(set: &UncertaintySet, groups: &[Vec<usize>]) -> bool {
    let used: Vec<&Vec<usize>> = groups.iter().filter(|g| !g.is_empty()).collect();
    if used.len() <= 1 {
        return true;
    }
    match set {
        UncertaintySet::Box { .. } => true,
        UncertaintySet::SimplexProduct { blocks } => {
            let mut owner = Vec::new();
            for (k, &b) in blocks.iter().enumerate() {
                owner.extend(std::iter::repeat_n(k, b));
            }
            // No simplex block may be shared between two groups.
            let mut claimed = vec![usize::MAX; blocks.len()];
            for (gi, g) in used.iter().enumerate() {
                for &c in g.iter() {
                    let k = owner[c];
                    if claimed[k] != usize::MAX && claimed[k] != gi {
                        return false;
                    }
                    claimed[k] = gi;
                }
            }
            true
        }
        _ => false,
    }
}

/// RC-R for a set that is a product of per-term blocks; exact in that case.
pub fn special_product_sets(p: &SumOfMaxProblem, map: &BlockMap) -> Result<RobustLp> {
    let l = p.dim_zeta();
    if map.term_block.len() != p.terms.len() {
        return Err(Error::Invalid("block map must assign every term".into()));
    }
    let mut owner = vec![usize::MAX; l];
    for (b, block) in map.blocks.iter().enumerate() {
        for &c in block {
            if c >= l || owner[c] != usize::MAX {
                return Err(Error::Invalid(format!("coordinate {c} is out of range or in two blocks")));
            }
            owner[c] = b;
        }
    }
    let mut taken = vec![None; map.blocks.len()];
    let mut groups = vec![Vec::new(); map.blocks.len()];
    for (i, t) in p.terms.iter().enumerate() {
        let b = map.term_block[i];
        if b >= map.blocks.len() {
            return Err(Error::Invalid(format!("term {i} maps to unknown block {b}")));
        }
        let support: Vec<usize> =
            (0..l).filter(|&c| t.iter().any(|f| f.zeta_support()[c])).collect();
        if support.is_empty() {
            continue;
        }
        if let Some(c) = support.iter().find(|&&c| owner[c] != b) {
            return Err(Error::Precondition(format!("term {i} depends on ζ{c} outside its block {b}")));
        }
        if let Some(other) = taken[b] {
            return Err(Error::Precondition(format!("terms {other} and {i} share block {b}")));
        }
        taken[b] = Some(i);
        groups[b] = support;
    }
    let base: Vec<usize> = (0..l).filter(|&c| p.base.zeta_support()[c]).collect();
    if base.iter().any(|&c| owner[c] != usize::MAX && taken[owner[c]].is_some()) {
        return Err(Error::Precondition("the base function shares ζ-coordinates with a term".into()));
    }
    groups.push(base);
    if !is_product(&p.set, &groups) {
        return Err(Error::Precondition(format!("a {} set is not a product of the blocks", p.set.kind_name())));
    }
    let mut r = rcr(p);
    r.exact = true;
    Ok(r)
}

/// Sum of absolute values `|αᵢ(x) + βᵢ(x)ᵀζ|` with disjoint supports over a
/// sign-symmetric set: `ℓ + Σ (aᵢ + βᵢ(x)ᵀζ) ≤ d` with `aᵢ ≥ ±αᵢ(x)`.
pub fn special_centrosymmetric_abs(p: &SumOfMaxProblem) -> Result<RobustLp> {
    if !abs_separable(p) {
        return Err(Error::Precondition(
            "terms must be |α + βᵀζ| pairs with disjoint ζ-supports, not shared with the base, over a zero-centered box, ellipsoid or budgeted set".into(),
        ));
    }
    let mut r = start(p);
    let l = p.dim_zeta();
    let ys: Vec<usize> = (0..p.terms.len()).map(|i| r.add_var(VarOrigin::Y(i), 0.0, f64::INFINITY)).collect();
    let n = r.n_vars();
    let mut top = lift(&p.base, n, &[(p.d_index, -1.0)]);
    for (t, &y) in p.terms.iter().zip(&ys) {
        let g = &t[0];
        let alpha = BiaffineForm::deterministic(g.constant(), g.x_linear().to_vec(), l);
        push(&mut r, lift(&alpha, n, &[(y, -1.0)]));
        push(&mut r, lift(&alpha.scaled(-1.0), n, &[(y, -1.0)]));
        let mut beta = g.clone();
        beta.set_constant(0.0);
        for k in 0..g.n_x() {
            beta.set_x(k, 0.0);
        }
        top.add_scaled(&beta, 1.0);
        top.add_x(y, 1.0);
    }
    push(&mut r, top);
    r.exact = true;
    Ok(r)
}

/// Recovers `ℓ(x) = c + gᵀx` from `f = α(ζ) + β(ζ)·ℓ(x)`.
fn factor_out(f: &BiaffineForm, alpha: &Affine, beta: &Affine) -> Option<(f64, Vec<f64>)> {
    let l = f.dim_zeta();
    let (c, g) = if beta.constant != 0.0 {
        ((f.constant() - alpha.constant) / beta.constant, f.x_linear().iter().map(|v| v / beta.constant).collect())
    } else {
        let k = (0..l).max_by(|&a, &b| beta.coef[a].abs().total_cmp(&beta.coef[b].abs()))?;
        if beta.coef[k] == 0.0 {
            return None;
        }
        let b = beta.coef[k];
        ((f.zeta_linear()[k] - alpha.coef[k]) / b, f.cross_row(k).iter().map(|v| v / b).collect::<Vec<f64>>())
    };
    let rebuilt = common_factor_form(alpha, beta, c, &g);
    let scale = f.max_abs_coef().max(1.0);
    (rebuilt.max_abs_diff(f) <= 1e-9 * scale).then_some((c, g))
}

fn common_factor_form(alpha: &Affine, beta: &Affine, c: f64, g: &[f64]) -> BiaffineForm {
    let l = alpha.coef.len();
    let mut f = BiaffineForm::zeros(g.len(), l);
    f.set_constant(alpha.constant + beta.constant * c);
    for (k, v) in g.iter().enumerate() {
        f.set_x(k, beta.constant * v);
    }
    for z in 0..l {
        f.set_zeta(z, alpha.coef[z] + beta.coef[z] * c);
        for (k, v) in g.iter().enumerate() {
            f.set_cross(z, k, beta.coef[z] * v);
        }
    }
    f
}

/// Terms of the form `αᵢ(ζ) + βᵢ(ζ)·ℓᵢⱼ(x)`. When every βᵢ is nonnegative
/// on the set the factored RC-R is emitted; otherwise one robust row per sign
/// pattern of the sign-indefinite βᵢ, with min-variables where βᵢ ≤ 0.
pub fn special_common_factor(p: &SumOfMaxProblem, alphas: &[Affine], betas: &[Affine]) -> Result<RobustLp> {
    let l = p.dim_zeta();
    let m = p.terms.len();
    if alphas.len() != m || betas.len() != m || alphas.iter().chain(betas).any(|a| a.coef.len() != l) {
        return Err(Error::Dimension("need one α and one β over ζ per term".into()));
    }
    let mut inner = Vec::with_capacity(m);
    for (i, t) in p.terms.iter().enumerate() {
        let mut pieces = Vec::with_capacity(t.len());
        for (j, f) in t.iter().enumerate() {
            let piece = factor_out(f, &alphas[i], &betas[i])
                .ok_or_else(|| Error::Precondition(format!("term {i} piece {j} is not α(ζ) + β(ζ)·ℓ(x)")))?;
            pieces.push(piece);
        }
        inner.push(pieces);
    }
    // Sign of each βᵢ over the set: +1, −1 or 0 when indefinite.
    let mut sign = Vec::with_capacity(m);
    for b in betas {
        let hi = max_affine(&p.set, &b.coef, b.constant)?.value;
        let lo = -max_affine(&p.set, &b.scaled(-1.0).coef, -b.constant)?.value;
        sign.push(if lo >= -1e-12 {
            1
        } else if hi <= 1e-12 {
            -1
        } else {
            0
        });
    }
    let indefinite: Vec<usize> = (0..m).filter(|&i| sign[i] == 0).collect();
    if !indefinite.is_empty() && !p.set.is_polyhedral() {
        return Err(Error::Unsupported("sign-indefinite factors need a polyhedral set".into()));
    }
    if indefinite.len() > 20 {
        return Err(Error::CapExceeded { count: 2f64.powi(indefinite.len() as i32), cap: 1 << 20 });
    }
    let mut r = start(p);
    // y ≥ every ℓᵢⱼ where βᵢ can be positive, z ≤ every ℓᵢⱼ where it can be
    // negative.
    let mut ymax = vec![None; m];
    let mut zmin = vec![None; m];
    for i in 0..m {
        if sign[i] >= 0 {
            ymax[i] = Some(r.add_free(VarOrigin::Y(i)));
        }
        if sign[i] <= 0 {
            zmin[i] = Some(r.add_free(VarOrigin::V(i)));
        }
    }
    let n = r.n_vars();
    for i in 0..m {
        for (c, g) in &inner[i] {
            let lf = BiaffineForm::deterministic(*c, g.clone(), l);
            if let Some(y) = ymax[i] {
                push(&mut r, lift(&lf, n, &[(y, -1.0)]));
            }
            if let Some(z) = zmin[i] {
                push(&mut r, lift(&lf.scaled(-1.0), n, &[(z, 1.0)]));
            }
        }
    }
    let mut base = lift(&p.base, n, &[(p.d_index, -1.0)]);
    for a in alphas {
        base.add_scaled(&BiaffineForm::from_parts(a.constant, vec![0.0; n], a.coef.clone(), vec![vec![0.0; n]; l])?, 1.0);
    }
    let times_beta = |f: &mut BiaffineForm, b: &Affine, v: usize| {
        f.add_x(v, b.constant);
        for z in 0..l {
            f.add_cross(z, v, b.coef[z]);
        }
    };
    for mask in 0u64..(1u64 << indefinite.len()) {
        let mut row = base.clone();
        let mut region = Region::whole(p.set.clone());
        for i in 0..m {
            let positive = match sign[i] {
                0 => {
                    let bit = indefinite.iter().position(|&k| k == i).unwrap();
                    let pos = mask >> bit & 1 == 1;
                    // β ≥ 0 is −βᵀζ ≤ β₀; β ≤ 0 is βᵀζ ≤ −β₀.
                    let s = if pos { -1.0 } else { 1.0 };
                    region.a.push(betas[i].coef.iter().map(|v| s * v).collect());
                    region.b.push(-s * betas[i].constant);
                    pos
                }
                s => s > 0,
            };
            let v = if positive { ymax[i] } else { zmin[i] }.unwrap();
            times_beta(&mut row, &betas[i], v);
        }
        let idx = if region.a.is_empty() { 0 } else { r.add_region(region) };
        if idx > 0 && r.regions[idx].nominal()?.is_none() {
            r.regions.pop();
            continue;
        }
        push_in(&mut r, row, idx);
    }
    r.exact = true;
    Ok(r)
}

/// `ℓ(ζ²,x) + Σᵢ ζ¹ᵢ·ℓᵢ(ζ²,x) ≤ d`, robust in ζ¹ (a box) and ζ² (`set`).
#[derive(Debug, Clone)]
pub struct Triaffine {
    pub n_x: usize,
    pub d_index: usize,
    pub set: UncertaintySet,
    pub base: BiaffineForm,
    pub factors: Vec<BiaffineForm>,
    pub side_constraints: Vec<SideConstraint>,
}

impl Triaffine {
    /// Left-hand side at `(ζ¹, ζ², x)`.
    pub fn eval(&self, z1: &[f64], z2: &[f64], x: &[f64]) -> f64 {
        self.base.eval(z2, x) + z1.iter().zip(&self.factors).map(|(a, f)| a * f.eval(z2, x)).sum::<f64>()
    }
}

/// Maximizes out the box parameter ζ¹ = c + ρu, ‖u‖∞ ≤ 1: the result is
/// `ℓ + Σ cᵢℓᵢ + Σ max{ρℓᵢ, −ρℓᵢ} ≤ d` over the second set.
pub fn biaffine_reduce(t: &Triaffine, first: &UncertaintySet) -> Result<SumOfMaxProblem> {
    let UncertaintySet::Box { center, radius } = first else {
        return Err(Error::Unsupported(format!("the first uncertainty set must be a box, got {}", first.kind_name())));
    };
    if center.len() != t.factors.len() {
        return Err(Error::Dimension(format!("{} factors for a box of dimension {}", t.factors.len(), center.len())));
    }
    let mut base = t.base.clone();
    for (c, f) in center.iter().zip(&t.factors) {
        base.add_scaled(f, *c);
    }
    let terms = if t.factors.is_empty() {
        vec![vec![BiaffineForm::zeros(t.n_x, t.set.dim())]]
    } else {
        t.factors.iter().map(|f| vec![f.scaled(*radius), f.scaled(-radius)]).collect()
    };
    SumOfMaxProblem::new(t.n_x, t.d_index, t.set.clone(), base, terms, t.side_constraints.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reformulate::eorlc;
    use crate::robust_lp::solve;

    fn form(c: f64, x: Vec<f64>, z: Vec<f64>, cross: Vec<Vec<f64>>) -> BiaffineForm {
        BiaffineForm::from_parts(c, x, z, cross).unwrap()
    }

    #[test]
    fn single_abs_over_box() {
        // |1 − x + 2xζ| with x fixed to 3.
        let g = form(1.0, vec![-1.0, 0.0], vec![0.0], vec![vec![2.0, 0.0]]);
        let p = SumOfMaxProblem::new(
            2,
            1,
            UncertaintySet::box_set(vec![0.0], 0.5),
            BiaffineForm::zeros(2, 1),
            vec![vec![g.clone(), g.scaled(-1.0)]],
            vec![SideConstraint::Bound { var: 0, lower: Some(3.0), upper: Some(3.0) }],
        )
        .unwrap();
        let s = solve(&special_centrosymmetric_abs(&p).unwrap()).unwrap();
        // |α| + ρ|β| = |1 − 3| + 0.5·6.
        assert!((s.value - 5.0).abs() < 1e-9);
        let off = p.with_set(UncertaintySet::ellipsoid(vec![0.1], 1.0)).unwrap();
        assert!(special_centrosymmetric_abs(&off).is_err());
    }

    #[test]
    fn cross_block_term_is_rejected() {
        let a = form(0.0, vec![1.0, 0.0], vec![1.0, 0.0], vec![vec![0.0; 2]; 2]);
        let b = form(0.0, vec![1.0, 0.0], vec![1.0, 1.0], vec![vec![0.0; 2]; 2]);
        let p = SumOfMaxProblem::new(
            2,
            1,
            UncertaintySet::unit_box(2),
            BiaffineForm::zeros(2, 2),
            vec![vec![a.clone(), BiaffineForm::zeros(2, 2)], vec![b, BiaffineForm::zeros(2, 2)]],
            vec![],
        )
        .unwrap();
        let map = BlockMap { blocks: vec![vec![0], vec![1]], term_block: vec![0, 1] };
        assert!(matches!(special_product_sets(&p, &map), Err(Error::Precondition(_))));
    }

    #[test]
    fn constant_factor_is_deterministic_max() {
        // max{x, 1 − x} with α = ζ, β = 1; plus nothing else.
        let l1 = form(0.0, vec![1.0, 0.0], vec![1.0], vec![vec![0.0, 0.0]]);
        let l2 = form(1.0, vec![-1.0, 0.0], vec![1.0], vec![vec![0.0, 0.0]]);
        let p = SumOfMaxProblem::new(2, 1, UncertaintySet::unit_box(1), BiaffineForm::zeros(2, 1), vec![vec![l1, l2]], vec![])
            .unwrap();
        let r = special_common_factor(&p, &[Affine::new(0.0, vec![1.0])], &[Affine::new(1.0, vec![0.0])]).unwrap();
        assert_eq!(r.regions.len(), 1);
        let s = solve(&r).unwrap();
        assert!((s.value - 1.5).abs() < 1e-9);
    }

    #[test]
    fn indefinite_factor_splits_regions() {
        // Two terms ζᵢ·max{x − 1, −x} over the unit box: four sign regions.
        let mk = |i: usize| {
            let mut z1 = vec![vec![0.0, 0.0]; 2];
            z1[i][0] = 1.0;
            let mut zv = vec![0.0; 2];
            zv[i] = -1.0;
            let a = form(0.0, vec![0.0, 0.0], zv, z1.clone());
            let mut z2 = vec![vec![0.0, 0.0]; 2];
            z2[i][0] = -1.0;
            let b = form(0.0, vec![0.0, 0.0], vec![0.0; 2], z2);
            vec![a, b]
        };
        let p = SumOfMaxProblem::new(2, 1, UncertaintySet::unit_box(2), BiaffineForm::zeros(2, 2), vec![mk(0), mk(1)], vec![])
            .unwrap();
        let alphas = vec![Affine::zeros(2); 2];
        let betas = vec![Affine::new(0.0, vec![1.0, 0.0]), Affine::new(0.0, vec![0.0, 1.0])];
        let r = special_common_factor(&p, &alphas, &betas).unwrap();
        assert_eq!(r.robust.len(), 4);
        let exact = solve(&eorlc(&p).unwrap()).unwrap().value;
        assert!((solve(&r).unwrap().value - exact).abs() < 1e-7);
    }

    #[test]
    fn empty_sign_region_is_dropped() {
        // β₁ = ζ and β₂ = 0.5 − ζ are never both negative.
        let mk = |b: &Affine| {
            let mut cross = vec![vec![0.0, 0.0]];
            cross[0][0] = b.coef[0];
            let a = form(0.0, vec![b.constant, 0.0], vec![0.0], cross.clone());
            vec![a.clone(), a.scaled(-1.0)]
        };
        let betas = vec![Affine::new(0.0, vec![1.0]), Affine::new(0.5, vec![-1.0])];
        let p = SumOfMaxProblem::new(
            2,
            1,
            UncertaintySet::unit_box(1),
            BiaffineForm::zeros(2, 1),
            vec![mk(&betas[0]), mk(&betas[1])],
            vec![],
        )
        .unwrap();
        let r = special_common_factor(&p, &[Affine::zeros(1), Affine::zeros(1)], &betas).unwrap();
        assert!(r.robust.len() < 4);
        let exact = solve(&eorlc(&p).unwrap()).unwrap().value;
        assert!((solve(&r).unwrap().value - exact).abs() < 1e-7);
    }

    #[test]
    fn zero_radius_removes_terms() {
        let t = Triaffine {
            n_x: 2,
            d_index: 1,
            set: UncertaintySet::unit_box(1),
            base: form(0.0, vec![1.0, 0.0], vec![1.0], vec![vec![0.0, 0.0]]),
            factors: vec![form(0.0, vec![1.0, 0.0], vec![0.0], vec![vec![0.0, 0.0]])],
            side_constraints: vec![],
        };
        let p = biaffine_reduce(&t, &UncertaintySet::box_set(vec![0.0], 0.0)).unwrap();
        assert!(p.terms[0].iter().all(|f| f.max_abs_coef() == 0.0));
        assert!(biaffine_reduce(&t, &UncertaintySet::ellipsoid(vec![0.0], 1.0)).is_err());
    }
}
