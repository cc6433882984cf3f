//! Problem data: biaffine forms, uncertainty sets, sum-of-maxima problems.

mod form;
mod io;
mod problem;
mod set;

pub(crate) use form::dot;
pub use form::{Affine, BiaffineForm};
pub use io::{parse_problem, read_problem, serialize_problem};
pub use problem::{Method, SideConstraint, Solution, SpecialCase, SumOfMaxProblem};
pub use set::{LinearRepr, UncertaintySet};
