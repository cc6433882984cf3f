//! A constraint with two uncertain parameters, the first in a box, becomes a
//! sum of absolute values in the second.

use rosom::model::{BiaffineForm, UncertaintySet};
use rosom::reformulate::{biaffine_reduce, Triaffine};
use rosom::solve::solve;
use rosom::Method;

fn main() -> rosom::Result<()> {
    // 1 − x₀ − x₁ + ζ¹₀(x₀ − ζ²₀) + ζ¹₁(x₁ + ζ²₁) ≤ d with 0 ≤ x ≤ 1.
    let n_x = 3;
    let set = UncertaintySet::VPolytope { vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]] };
    let base = BiaffineForm::from_parts(1.0, vec![-1.0, -1.0, 0.0], vec![0.0, 0.0], vec![vec![0.0; n_x]; 2])?;
    let f1 = BiaffineForm::from_parts(0.0, vec![1.0, 0.0, 0.0], vec![-1.0, 0.0], vec![vec![0.0; n_x]; 2])?;
    let f2 = BiaffineForm::from_parts(0.0, vec![0.0, 1.0, 0.0], vec![0.0, 1.0], vec![vec![0.0; n_x]; 2])?;
    let side = vec![
        rosom::SideConstraint::Bound { var: 0, lower: Some(0.0), upper: Some(1.0) },
        rosom::SideConstraint::Bound { var: 1, lower: Some(0.0), upper: Some(1.0) },
    ];
    let t = Triaffine { n_x, d_index: 2, set, base, factors: vec![f1, f2], side_constraints: side };
    let p = biaffine_reduce(&t, &UncertaintySet::Box { center: vec![0.0, 0.0], radius: 0.5 })?;
    let rep = solve(&p, Method::Eorlc, &Default::default())?;
    println!("x = {:?}, worst-case value {:.6}", &rep.x[..2], rep.value);
    Ok(())
}
