pub mod cli;
pub mod cutplane;
pub mod error;
pub mod linsolve;
pub mod model;
pub mod oracle;
pub mod problems;
pub mod reformulate;
pub mod rng;
pub mod solve;
pub mod robust_lp;

pub use error::{Error, Result};
pub use model::{BiaffineForm, Method, SideConstraint, Solution, SumOfMaxProblem, UncertaintySet};
