//! Bounds of the three cutting-plane drivers, printed as the trace CSV.

use rosom::cutplane::{algorithm1, algorithm2, combined, CutPlaneConfig, Stopping};
use rosom::problems::{random_instance, Dims, SetKind};

fn main() -> rosom::Result<()> {
    let dims = Dims { n_x: 3, terms: 4, pieces: 3, dim_zeta: 3 };
    let p = random_instance(dims, SetKind::Budgeted, 11);
    let cfg = CutPlaneConfig { stopping: Stopping::Relative, epsilon: 1e-7, ..CutPlaneConfig::default() };
    for (name, run) in [("alg1", algorithm1 as fn(&_, &_) -> _), ("alg2", algorithm2), ("combined", combined)] {
        let res = run(&p, &cfg)?;
        println!("# {name}: {:?} at {:.6}", res.termination, res.value);
        print!("{}", res.trace.to_csv(false));
    }
    Ok(())
}
