//! Worst case of a fixed decision: enumeration over assignments against the
//! mixed-integer formulation.

use rosom::oracle::{true_value_enum, true_value_milp};
use rosom::problems::{random_instance, Dims, SetKind};

fn main() -> rosom::Result<()> {
    let dims = Dims { n_x: 2, terms: 5, pieces: 3, dim_zeta: 4 };
    for kind in [SetKind::Box, SetKind::VPolytope, SetKind::Budgeted] {
        let p = random_instance(dims, kind, 3);
        let x = vec![0.5; p.n_x];
        let e = true_value_enum(&p, &x)?;
        let m = true_value_milp(&p, &x, None)?;
        println!("{kind:?}: enum {:.6}  milp {:.6}  ζ* {:?}", e.value, m.value, e.zeta);
    }
    Ok(())
}
