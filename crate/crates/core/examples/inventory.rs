//! Inventory with affine order rules and uncertain demand. Splitting the
//! sum of maxima into fewer groups gives tighter (smaller) bounds.

use rosom::cutplane::{algorithm2, CutPlaneConfig};
use rosom::problems::{inventory, InventoryParams};
use rosom::solve::solve;
use rosom::Method;

fn main() -> rosom::Result<()> {
    let params = InventoryParams { ellipsoid: true, ..InventoryParams::default() };
    let p = inventory(&params)?;
    let cfg = CutPlaneConfig { epsilon: 0.1, ..CutPlaneConfig::default() };
    for m in ["rcr", "aarcr", "split:6", "split:4", "split:3", "split:2"] {
        let rep = solve(&p, m.parse()?, &cfg)?;
        println!("{m:<8} {:.3}", rep.value);
    }
    let alg2 = algorithm2(&p, &cfg)?;
    println!("alg2     {:.3} ({} iterations)", alg2.value, alg2.iterations);
    let eorlc = solve(&p, Method::Eorlc, &cfg)?;
    println!("eorlc    {:.3} (2^{} robust rows)", eorlc.value, params.periods);
    Ok(())
}
