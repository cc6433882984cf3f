//! Command-line front end. `run` returns the process exit code:
//! 0 success, 1 I/O, parse or usage error, 2 flagged non-convergence,
//! 3 method and problem do not fit together.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cutplane::{CutPlaneConfig, Stopping};
use crate::error::{Error, Result};
use crate::model::{read_problem, serialize_problem, Method, Solution, SumOfMaxProblem};
use crate::oracle::{self, OracleKind, OracleOptions};
use crate::problems::{self, Dims, InventoryParams, SetKind};
use crate::solve::{self, RunStatus};

#[derive(Debug, Parser)]
#[command(name = "rosom", version, about = "Robust counterparts of sums of maxima of biaffine functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated problem as JSON.
    Generate(GenerateArgs),
    /// Solve a problem with one method.
    Solve(SolveArgs),
    /// Worst-case value of a stored solution.
    Truevalue(TrueValueArgs),
    /// Run several methods and tabulate method and true values as CSV.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Example {
    Toy1,
    Toy2,
    Regression,
    Inventory,
    Brachy,
    Random,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    example: Example,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Observations (regression).
    #[arg(long, default_value_t = 15)]
    n: usize,
    /// Uncertainty radius (regression 0.05, inventory 10).
    #[arg(long)]
    omega: Option<f64>,
    /// Periods (inventory).
    #[arg(long = "T", default_value_t = 12)]
    periods: usize,
    #[arg(long, default_value_t = 5.0)]
    dbar: f64,
    #[arg(long, default_value_t = 1.0)]
    c_h: f64,
    #[arg(long, default_value_t = 2.0)]
    c_b: f64,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    /// Plain demand ball instead of the nonnegative part (inventory).
    #[arg(long)]
    ellipsoid: bool,
    /// Dose points (brachy).
    #[arg(long, default_value_t = 6)]
    points: usize,
    #[arg(long, default_value_t = 2)]
    catheters: usize,
    #[arg(long, default_value_t = 3)]
    sides: usize,
    /// Decisions besides d (random).
    #[arg(long, default_value_t = 2)]
    nx: usize,
    #[arg(long, default_value_t = 2)]
    terms: usize,
    #[arg(long, default_value_t = 2)]
    pieces: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// box, ellipsoid, truncated_ellipsoid, v_polytope, h_polytope, budgeted or simplex_product.
    #[arg(long, default_value = "box")]
    set: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StoppingArg {
    Abs,
    Rel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleArg {
    Enum,
    Milp,
}

#[derive(Debug, Args)]
struct RunFlags {
    /// Cutting-plane gap tolerance.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, value_enum, default_value = "abs")]
    stopping: StoppingArg,
    #[arg(long, value_enum, default_value = "enum")]
    oracle: OracleArg,
    #[arg(long)]
    lazy_oracle: bool,
    #[arg(long)]
    lazy_master: bool,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long)]
    time_limit_s: Option<f64>,
    /// Leave timing out of every output so runs compare byte for byte.
    #[arg(long)]
    no_timing: bool,
}

impl RunFlags {
    fn config(&self) -> Result<CutPlaneConfig> {
        let time_limit = match self.time_limit_s {
            Some(s) if !(s.is_finite() && s > 0.0) => {
                return Err(Error::Invalid(format!("time limit must be positive, got {s}")))
            }
            s => s.map(Duration::from_secs_f64),
        };
        Ok(CutPlaneConfig {
            epsilon: self.eps,
            stopping: match self.stopping {
                StoppingArg::Abs => Stopping::Absolute,
                StoppingArg::Rel => Stopping::Relative,
            },
            oracle: oracle_options(self.oracle),
            lazy_oracle: self.lazy_oracle,
            lazy_master: self.lazy_master,
            max_iterations: self.max_iter,
            time_limit,
        })
    }
}

fn oracle_options(o: OracleArg) -> OracleOptions {
    let kind = match o {
        OracleArg::Enum => OracleKind::Enum,
        OracleArg::Milp => OracleKind::Milp,
    };
    OracleOptions { kind, ..OracleOptions::default() }
}

#[derive(Debug, Args)]
struct SolveArgs {
    problem: PathBuf,
    /// nominal, rcr, aarcr, eorlc, vertex, alg1, alg2, combined, split:k, scenario, special:abs, special:product.
    #[arg(long)]
    method: String,
    #[command(flatten)]
    flags: RunFlags,
    /// Solution JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cutting-plane trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Accepted for symmetry with `generate`; solving is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct TrueValueArgs {
    problem: PathBuf,
    solution: PathBuf,
    #[arg(long, value_enum, default_value = "enum")]
    oracle: OracleArg,
}

#[derive(Debug, Args)]
struct CompareArgs {
    problem: PathBuf,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', required = true)]
    methods: Vec<String>,
    #[command(flatten)]
    flags: RunFlags,
    /// CSV file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accepted for symmetry with `generate`; solving is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Unsupported(_) | Error::Precondition(_) | Error::CapExceeded { .. } => 3,
        _ => 1,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let res = match cli.command {
        Command::Generate(a) => generate(&a).map(|_| 0),
        Command::Solve(a) => solve_cmd(&a),
        Command::Truevalue(a) => truevalue(&a).map(|_| 0),
        Command::Compare(a) => compare(&a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let p = match a.example {
        Example::Toy1 => problems::toy1(),
        Example::Toy2 => problems::toy2(),
        Example::Regression => {
            if a.n < 2 {
                return Err(Error::Invalid("regression needs at least 2 observations".into()));
            }
            problems::regression(a.n, a.omega.unwrap_or(0.05), a.seed)?.0
        }
        Example::Inventory => problems::inventory(&InventoryParams {
            periods: a.periods,
            omega: a.omega.unwrap_or(10.0),
            dbar: a.dbar,
            c_h: a.c_h,
            c_b: a.c_b,
            x0: a.x0,
            ellipsoid: a.ellipsoid,
        })?,
        Example::Brachy => problems::brachy_like(a.points, a.catheters, a.sides, a.seed)?,
        Example::Random => {
            let kind: SetKind = a.set.parse()?;
            let dims = Dims { n_x: a.nx, terms: a.terms, pieces: a.pieces, dim_zeta: a.dim };
            problems::random_instance(dims, kind, a.seed)
        }
    };
    let mut text = serialize_problem(&p)?;
    text.push('\n');
    write_out(a.out.as_deref(), &text)
}

fn solve_cmd(a: &SolveArgs) -> Result<i32> {
    let p = read_problem(&a.problem)?;
    let method: Method = a.method.parse()?;
    let cfg = a.flags.config()?;
    let rep = solve::solve(&p, method, &cfg)?;
    let mut s = String::new();
    let _ = writeln!(s, "method {}", rep.method);
    let _ = writeln!(s, "v_method {}", rep.value);
    let _ = writeln!(s, "iterations {}", rep.iterations);
    let _ = writeln!(s, "status {}", rep.status.as_str());
    let _ = writeln!(s, "exact {}", rep.exact);
    if !a.flags.no_timing {
        let _ = writeln!(s, "elapsed_ms {}", rep.elapsed.as_millis());
    }
    write_out(None, &s)?;
    if let Some(out) = &a.out {
        std::fs::write(out, serde_json::to_string_pretty(&rep.solution())? + "\n")?;
    }
    if let (Some(path), Some(trace)) = (&a.trace, &rep.trace) {
        std::fs::write(path, trace.to_csv(!a.flags.no_timing))?;
    }
    Ok(match rep.status {
        RunStatus::Optimal => 0,
        RunStatus::NotConverged => {
            eprintln!("warning: {} stopped before converging", rep.method);
            2
        }
    })
}

fn read_solution(path: &Path, p: &SumOfMaxProblem) -> Result<Solution> {
    let sol: Solution = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if sol.x.len() != p.n_x {
        return Err(Error::Dimension(format!("solution has {} entries, problem has {} variables", sol.x.len(), p.n_x)));
    }
    Ok(sol)
}

fn truevalue(a: &TrueValueArgs) -> Result<()> {
    let p = read_problem(&a.problem)?;
    let sol = read_solution(&a.solution, &p)?;
    let wc = oracle::true_value(&p, &sol.x, &oracle_options(a.oracle), None)?;
    let zeta: Vec<String> = wc.zeta.iter().map(|v| v.to_string()).collect();
    write_out(None, &format!("v_true {}\nzeta {}\n", wc.value, zeta.join(",")))
}

fn compare(a: &CompareArgs) -> Result<i32> {
    let methods: Vec<&str> = a.methods.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
    if methods.is_empty() {
        return Err(Error::Invalid("compare needs at least one method".into()));
    }
    let p = read_problem(&a.problem)?;
    let cfg = a.flags.config()?;
    let mut csv = String::from("method,iterations,solve_millis,v_method,v_true,status\n");
    let mut failures = 0;
    for name in &methods {
        let row = name.parse::<Method>().and_then(|m| {
            let rep = solve::solve(&p, m, &cfg)?;
            let wc = oracle::true_value(&p, &rep.x, &cfg.oracle, None)?;
            Ok((rep, wc.value))
        });
        match row {
            Ok((rep, v_true)) => {
                let millis = if a.flags.no_timing { String::new() } else { rep.elapsed.as_millis().to_string() };
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    rep.method,
                    rep.iterations,
                    millis,
                    rep.value,
                    v_true,
                    rep.status.as_str()
                );
            }
            Err(e) => {
                failures += 1;
                eprintln!("{name}: {e}");
                let status = if exit_code(&e) == 3 { "incompatible" } else { "failed" };
                let _ = writeln!(csv, "{name},,,,,{status}");
            }
        }
    }
    write_out(a.out.as_deref(), &csv)?;
    Ok(if failures == methods.len() { 1 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["rosom", "frobnicate"]), 1);
        assert_eq!(run(["rosom", "compare", "x.json"]), 1);
    }

    #[test]
    fn incompatibility_is_three() {
        assert_eq!(exit_code(&Error::Unsupported("x".into())), 3);
        assert_eq!(exit_code(&Error::Infeasible), 1);
    }
}
