//! Placement solvers: exact branch-and-bound, simulated annealing, greedy
//! nearest-site and first-fit baseline.

mod annealing;
mod exact;
mod heuristics;
mod placement;

pub use annealing::{cooling_schedule, sa_initial_solution, sa_neighbor, solve_sa, SaParams};
pub use exact::{solve_exact, ExactLimits};
pub use heuristics::{solve_baseline, solve_greedy};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{evaluate_cost, CostBreakdown, Instance, RequestId, Solution};
use crate::topology::NodeId;
use placement::Placement;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("instance too large for the exact solver: {0}")]
    ExactCapExceeded(String),
    #[error("invalid annealing parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Sa,
    Greedy,
    Baseline,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::Exact,
        SolverKind::Sa,
        SolverKind::Greedy,
        SolverKind::Baseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Sa => "sa",
            SolverKind::Greedy => "greedy",
            SolverKind::Baseline => "baseline",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown solver `{s}` (expected exact|sa|greedy|baseline)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: SolverKind,
    /// Node ids of the instance's sites; `site` fields in the solution index this list.
    pub sites: Vec<NodeId>,
    pub solution: Solution,
    pub cost: CostBreakdown,
    pub rejected_requests: Vec<RequestId>,
    /// Search nodes (exact) or neighbor evaluations (annealing); 1 for single-pass heuristics.
    pub iterations_evaluated: u64,
    pub wall_time: f64,
}

impl SolveReport {
    pub fn rejected_set(&self) -> BTreeSet<RequestId> {
        self.rejected_requests.iter().copied().collect()
    }
}

pub(crate) fn finish(
    solver: SolverKind,
    placement: &Placement<'_>,
    iterations_evaluated: u64,
    started: Instant,
) -> SolveReport {
    let inst = placement.instance();
    let solution = placement.to_solution();
    let cost = evaluate_cost(&solution, inst).expect("solver emits resolvable ids");
    let rejected_requests = inst
        .requests()
        .iter()
        .filter(|r| !solution.assignments.contains_key(&r.id))
        .map(|r| r.id)
        .collect();
    SolveReport {
        solver,
        sites: inst.sites().to_vec(),
        solution,
        cost,
        rejected_requests,
        iterations_evaluated,
        wall_time: started.elapsed().as_secs_f64(),
    }
}

/// Runs one solver with its default settings (annealing uses `sa`).
pub fn solve(
    kind: SolverKind,
    instance: &Instance,
    sa: &SaParams,
    limits: &ExactLimits,
) -> Result<SolveReport, SolverError> {
    match kind {
        SolverKind::Exact => solve_exact(instance, limits),
        SolverKind::Sa => solve_sa(instance, sa),
        SolverKind::Greedy => Ok(solve_greedy(instance)),
        SolverKind::Baseline => Ok(solve_baseline(instance)),
    }
}
