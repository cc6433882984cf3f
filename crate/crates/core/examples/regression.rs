//! Least absolute deviations with errors in the regressor. The ball makes
//! the exact counterpart a conic program; RC-R and AARC-R overestimate it.

use rosom::cutplane::{algorithm1, algorithm2, CutPlaneConfig};
use rosom::oracle::{true_value, OracleOptions};
use rosom::problems::regression;
use rosom::solve::solve;
use rosom::Method;

fn main() -> rosom::Result<()> {
    let (p, data) = regression(15, 0.05, 7)?;
    let cfg = CutPlaneConfig::default();
    let oracle = OracleOptions::default();
    for m in [Method::Nominal, Method::Rcr, Method::Aarcr] {
        let rep = solve(&p, m, &cfg)?;
        let v_true = true_value(&p, &rep.x, &oracle, None)?.value;
        println!("{:<8} β = ({:.4}, {:.4})  v_method {:.4}  v_true {:.4}", m.to_string(), rep.x[0], rep.x[1], rep.value, v_true);
    }

    let a1 = algorithm1(&p, &cfg)?;
    println!("alg1     value {:.6} after {} points", a1.value, a1.vertices_added);
    let a2 = algorithm2(&p, &cfg)?;
    println!("alg2     value {:.6} after {} robust rows", a2.value, a2.rows_added);
    // The worst case has a closed form in (β₀, β₁).
    println!("closed form at the alg1 solution: {:.6}", data.worst_case(a1.x[0], a1.x[1]));
    Ok(())
}
