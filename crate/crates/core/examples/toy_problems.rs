//! The two toy problems under every applicable method. RC-R and AARC-R are
//! conservative; the exact methods agree.

use rosom::cutplane::CutPlaneConfig;
use rosom::oracle::{true_value, OracleOptions};
use rosom::problems::{toy1, toy2};
use rosom::solve::solve;
use rosom::Method;

fn main() -> rosom::Result<()> {
    let cfg = CutPlaneConfig::default();
    let methods = ["nominal", "rcr", "aarcr", "eorlc", "vertex", "alg1", "alg2", "combined"];
    for (name, p) in [("TOY1", toy1()), ("TOY2", toy2())] {
        println!("{name}");
        for m in methods {
            let m: Method = m.parse()?;
            let rep = solve(&p, m, &cfg)?;
            let v_true = true_value(&p, &rep.x, &OracleOptions::default(), None)?.value;
            println!("  {:<9} v_method {:>8.4}  v_true {:>8.4}", m.to_string(), rep.value, v_true);
        }
    }
    Ok(())
}
