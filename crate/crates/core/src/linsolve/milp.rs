use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use super::{LinearProgram, LpStatus};
use crate::error::{Error, Result};

const INT_TOL: f64 = 1e-6;

/// An LP in which some variables must take values in {0, 1}.
#[derive(Debug, Clone)]
pub struct Milp {
    pub lp: LinearProgram,
    pub binaries: Vec<usize>,
}

/// Candidate completion: given an LP relaxation point, propose a feasible
/// point and its objective value.
pub type Heuristic<'a> = dyn FnMut(&[f64]) -> Option<(Vec<f64>, f64)> + 'a;

pub struct MilpOptions<'a> {
    pub time_limit: Option<Duration>,
    /// Stop when `incumbent - bound ≤ gap_tol · max(1, |incumbent|)`.
    pub gap_tol: f64,
    /// Return as soon as an incumbent below this value is known.
    pub stop_below: Option<f64>,
    pub heuristic: Option<Box<Heuristic<'a>>>,
}

impl Default for MilpOptions<'_> {
    fn default() -> Self {
        MilpOptions { time_limit: None, gap_tol: 1e-9, stop_below: None, heuristic: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Time limit hit; incumbent and bound are returned.
    TimeLimit,
    /// `stop_below` satisfied before optimality was proven.
    EarlyStop,
}

#[derive(Debug, Clone)]
pub struct MilpResult {
    pub status: MilpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    /// Best proven lower bound.
    pub bound: f64,
    pub nodes: usize,
}

struct Node {
    bound: f64,
    depth: usize,
    seq: usize,
    fixes: Vec<(usize, f64)>,
    basis: Vec<usize>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap: smallest bound first, then deeper, then older.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Best-bound branch and bound, branching on the most fractional binary.
pub fn solve_milp(m: &Milp, mut opts: MilpOptions<'_>) -> Result<MilpResult> {
    m.lp.validate()?;
    let n = m.lp.n();
    if let Some(&j) = m.binaries.iter().find(|&&j| j >= n) {
        return Err(Error::Dimension(format!("binary index {j} out of range")));
    }
    let start = Instant::now();
    let mut lp = m.lp.clone();
    for &j in &m.binaries {
        lp.lower[j] = lp.lower[j].max(0.0);
        lp.upper[j] = lp.upper[j].min(1.0);
    }
    let mut session = lp.session();
    let base_bounds: Vec<(f64, f64)> = m.binaries.iter().map(|&j| (lp.lower[j], lp.upper[j])).collect();
    let depth_cap = 10 * m.binaries.len().max(1);

    let mut incumbent: Option<(Vec<f64>, f64)> = None;
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut nodes = 0usize;
    heap.push(Node { bound: f64::NEG_INFINITY, depth: 0, seq, fixes: Vec::new(), basis: Vec::new() });

    let finish = |status, incumbent: Option<(Vec<f64>, f64)>, bound: f64, nodes| {
        let (x, value) = incumbent.unwrap_or((Vec::new(), f64::INFINITY));
        Ok(MilpResult { status, x, value, bound: bound.min(value), nodes })
    };

    while let Some(node) = heap.pop() {
        let inc_val = incumbent.as_ref().map_or(f64::INFINITY, |(_, v)| *v);
        if node.bound >= inc_val - opts.gap_tol * inc_val.abs().max(1.0) {
            // Best-bound order: every remaining node is at least as bad.
            return finish(MilpStatus::Optimal, incumbent, node.bound, nodes);
        }
        if let Some(limit) = opts.time_limit {
            if start.elapsed() > limit {
                let status = if incumbent.is_some() { MilpStatus::TimeLimit } else { MilpStatus::Infeasible };
                return finish(status, incumbent, node.bound, nodes);
            }
        }
        nodes += 1;
        for (k, &j) in m.binaries.iter().enumerate() {
            session.set_bounds(j, base_bounds[k].0, base_bounds[k].1);
        }
        for &(j, v) in &node.fixes {
            session.set_bounds(j, v, v);
        }
        if !node.basis.is_empty() {
            session.set_basis(&node.basis)?;
        }
        let r = session.solve()?;
        match r.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                if nodes == 1 {
                    return Ok(MilpResult {
                        status: MilpStatus::Unbounded,
                        x: Vec::new(),
                        value: f64::NEG_INFINITY,
                        bound: f64::NEG_INFINITY,
                        nodes,
                    });
                }
                continue;
            }
            _ => {}
        }
        if r.value >= inc_val - opts.gap_tol * inc_val.abs().max(1.0) {
            continue;
        }
        if let Some(h) = opts.heuristic.as_mut() {
            if let Some((x, v)) = h(&r.x) {
                if v < incumbent.as_ref().map_or(f64::INFINITY, |(_, iv)| *iv) {
                    incumbent = Some((x, v));
                }
            }
        }
        // Most fractional binary.
        let mut branch = None;
        let mut best_frac = INT_TOL;
        for &j in &m.binaries {
            let f = (r.x[j] - r.x[j].round()).abs();
            if f > best_frac {
                best_frac = f;
                branch = Some(j);
            }
        }
        match branch {
            None => {
                let mut x = r.x.clone();
                for &j in &m.binaries {
                    x[j] = x[j].round();
                }
                let v = r.value;
                if v < incumbent.as_ref().map_or(f64::INFINITY, |(_, iv)| *iv) {
                    incumbent = Some((x, v));
                }
            }
            Some(j) if node.depth < depth_cap => {
                let basis = session.basis();
                // Explore the side the relaxation leans toward first.
                let first = if r.x[j] >= 0.5 { 1.0 } else { 0.0 };
                for v in [first, 1.0 - first] {
                    seq += 1;
                    let mut fixes = node.fixes.clone();
                    fixes.push((j, v));
                    heap.push(Node { bound: r.value, depth: node.depth + 1, seq, fixes, basis: basis.clone() });
                }
            }
            Some(_) => log::warn!("branch and bound depth cap reached; node dropped"),
        }
        if let (Some(stop), Some((_, v))) = (opts.stop_below, incumbent.as_ref()) {
            if *v < stop {
                let bound = heap.peek().map_or(*v, |n| n.bound.min(r.value));
                return finish(MilpStatus::EarlyStop, incumbent, bound, nodes);
            }
        }
    }
    match incumbent {
        Some((x, v)) => Ok(MilpResult { status: MilpStatus::Optimal, x, value: v, bound: v, nodes }),
        None => Ok(MilpResult {
            status: MilpStatus::Infeasible,
            x: Vec::new(),
            value: f64::INFINITY,
            bound: f64::INFINITY,
            nodes,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knapsack_pick_one() {
        // max 2 z1 + 3 z2  s.t. z1 + z2 <= 1
        let lp = LinearProgram::new(vec![-2.0, -3.0]).le(vec![1.0, 1.0], 1.0);
        let r = solve_milp(&Milp { lp, binaries: vec![0, 1] }, MilpOptions::default()).unwrap();
        assert_eq!(r.status, MilpStatus::Optimal);
        assert!((r.value + 3.0).abs() < 1e-9);
        assert!(r.value >= r.bound - 1e-12);
    }

    #[test]
    fn integral_relaxation_needs_no_branching() {
        // assignment-like: z1 + z2 = 1, min z1 + 2 z2
        let lp = LinearProgram::new(vec![1.0, 2.0]).eq(vec![1.0, 1.0], 1.0);
        let r = solve_milp(&Milp { lp, binaries: vec![0, 1] }, MilpOptions::default()).unwrap();
        assert_eq!(r.nodes, 1);
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_binary_program() {
        let lp = LinearProgram::new(vec![1.0]).le(vec![-1.0], -0.5).le(vec![1.0], 0.7);
        let r = solve_milp(&Milp { lp, binaries: vec![0] }, MilpOptions::default()).unwrap();
        assert_eq!(r.status, MilpStatus::Infeasible);
    }
}
