//! Structured instances with exact formulations of RC-R size.

use rosom::cutplane::CutPlaneConfig;
use rosom::problems::regression;
use rosom::solve::solve;
use rosom::Method;

fn main() -> rosom::Result<()> {
    // Sum of absolute values, ζᵢ only in term i, set centered at zero.
    let (p, _) = regression(40, 0.05, 3)?;
    let cfg = CutPlaneConfig::default();
    let fast = solve(&p, "special:abs".parse()?, &cfg)?;
    let alg2 = solve(&p, Method::Alg2, &cfg)?;
    println!("special:abs {:.6} in {:?}", fast.value, fast.elapsed);
    println!("alg2        {:.6} in {:?}", alg2.value, alg2.elapsed);
    Ok(())
}
