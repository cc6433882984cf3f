//! Scenario formulation for products of simplices.

use super::{push_fixed, start};
use crate::error::{Error, Result};
use crate::linsolve::RowKind;
use crate::model::{Affine, BiaffineForm, SumOfMaxProblem, UncertaintySet};
use crate::robust_lp::{RobustLp, VarOrigin};

/// The part of `f` that block `k` contributes at its `s`-th vertex; the
/// ζ-free part is charged to block 0.
fn block_part(f: &BiaffineForm, k: usize, coord: usize) -> Affine {
    let mut coef = f.cross_row(coord).to_vec();
    let mut constant = f.zeta_linear()[coord];
    if k == 0 {
        constant += f.constant();
        for (c, v) in coef.iter_mut().zip(f.x_linear()) {
            *c += v;
        }
    }
    Affine { constant, coef }
}

/// Per-block epigraph formulation over a product of simplices:
/// `Σₖ zₖ ≤ d`, `zₖ ≥ Σᵢ wᵢₖₛ`, `wᵢₖₛ ≥ yᵢⱼₖ + ℓᵢⱼₖ(eₛ, x)`, `Σₖ yᵢⱼₖ = 0`.
/// A base function that is not identically zero is treated as one more
/// single-piece term.
pub fn scenario_formulation(p: &SumOfMaxProblem) -> Result<RobustLp> {
    let UncertaintySet::SimplexProduct { blocks } = &p.set else {
        return Err(Error::Unsupported(format!(
            "the scenario formulation needs a simplex product set, got {}",
            p.set.kind_name()
        )));
    };
    let mut terms: Vec<&[BiaffineForm]> = p.terms.iter().map(|t| t.as_slice()).collect();
    if p.base.max_abs_coef() != 0.0 {
        terms.push(std::slice::from_ref(&p.base));
    }
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut at = 0;
    for &b in blocks {
        offsets.push(at);
        at += b;
    }
    let mut r = start(p);
    let z: Vec<usize> = (0..blocks.len()).map(|k| r.add_free(VarOrigin::ScenarioZ(k))).collect();
    let mut top = vec![(p.d_index, -1.0)];
    top.extend(z.iter().map(|&v| (v, 1.0)));
    r.add_row(top, RowKind::Le, 0.0);
    let mut w = Vec::new();
    for i in 0..terms.len() {
        let mut wi = Vec::new();
        for (k, &b) in blocks.iter().enumerate() {
            wi.push((0..b).map(|s| r.add_free(VarOrigin::ScenarioW { term: i, block: k, scenario: s })).collect::<Vec<_>>());
        }
        w.push(wi);
    }
    for (k, &b) in blocks.iter().enumerate() {
        for s in 0..b {
            let mut row: Vec<(usize, f64)> = (0..terms.len()).map(|i| (w[i][k][s], 1.0)).collect();
            row.push((z[k], -1.0));
            r.add_row(row, RowKind::Le, 0.0);
        }
    }
    for (i, t) in terms.iter().enumerate() {
        for (j, f) in t.iter().enumerate() {
            let y: Vec<usize> =
                (0..blocks.len()).map(|k| r.add_free(VarOrigin::ScenarioY { term: i, piece: j, block: k })).collect();
            r.add_row(y.iter().map(|&v| (v, 1.0)).collect(), RowKind::Eq, 0.0);
            for (k, &b) in blocks.iter().enumerate() {
                for s in 0..b {
                    let part = block_part(f, k, offsets[k] + s);
                    push_fixed(&mut r, &part, &[(y[k], 1.0), (w[i][k][s], -1.0)]);
                }
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reformulate::aarcr;
    use crate::robust_lp::solve;

    #[test]
    fn single_scenario_is_nominal() {
        // max{x − 1, 1 − x} + ζ·x over one trivial simplex, x ∈ [0, 3].
        let a = BiaffineForm::from_parts(-1.0, vec![1.0, 0.0], vec![0.0], vec![vec![0.0, 0.0]]).unwrap();
        let base = BiaffineForm::from_parts(0.0, vec![0.0, 0.0], vec![0.0], vec![vec![1.0, 0.0]]).unwrap();
        let p = SumOfMaxProblem::new(
            2,
            1,
            UncertaintySet::SimplexProduct { blocks: vec![1] },
            base,
            vec![vec![a.clone(), a.scaled(-1.0)]],
            vec![crate::SideConstraint::Bound { var: 0, lower: Some(0.0), upper: Some(3.0) }],
        )
        .unwrap();
        let s = solve(&scenario_formulation(&p).unwrap()).unwrap();
        // min over x of |x − 1| + x is 1 at x = 0.
        assert!((s.value - 1.0).abs() < 1e-9);
        let t = solve(&aarcr(&p)).unwrap();
        assert!((s.value - t.value).abs() < 1e-9);
    }
}
