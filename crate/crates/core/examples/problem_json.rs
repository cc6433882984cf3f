//! Problems round-trip through JSON; this prints TOY2 and solves the parsed
//! copy.

use rosom::model::{parse_problem, serialize_problem};
use rosom::problems::toy2;
use rosom::solve::solve;
use rosom::Method;

fn main() -> rosom::Result<()> {
    let text = serialize_problem(&toy2())?;
    println!("{text}");
    let p = parse_problem(&text)?;
    println!("eorlc on the parsed copy: {}", solve(&p, Method::Eorlc, &Default::default())?.value);
    Ok(())
}
