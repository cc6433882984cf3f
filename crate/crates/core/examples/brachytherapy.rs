//! Dose planning with a simplex-product set: the scenario formulation and
//! the AARC-R coincide, and the cutting planes reach the exact value.

use rosom::cutplane::{algorithm1, CutPlaneConfig};
use rosom::problems::brachy_like;
use rosom::solve::solve;
use rosom::Method;

fn main() -> rosom::Result<()> {
    let p = brachy_like(6, 2, 3, 1)?;
    let cfg = CutPlaneConfig { epsilon: 0.05, ..CutPlaneConfig::default() };
    for m in [Method::Nominal, Method::Rcr, Method::Aarcr, Method::Scenario, Method::Eorlc] {
        println!("{:<9} {:.4}", m.to_string(), solve(&p, m, &cfg)?.value);
    }
    let a1 = algorithm1(&p, &cfg)?;
    println!("alg1      {:.4} in {} iterations", a1.value, a1.iterations);
    Ok(())
}
