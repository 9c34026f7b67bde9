//! Exact solvers for the placement and scheduling ILP.
//!
//! [`solve`] runs a depth-first branch-and-bound over task-to-node choices.
//! Placements are never branched on: with nonnegative placement costs the
//! cheapest placement set for a schedule is the one it induces. [`brute_force`]
//! enumerates every task-to-node map and serves as the test oracle.
//!
//! Optimal assignments are not unique. Among equal-cost solutions the solver
//! keeps the first one it finds under its fixed branching order, which may
//! differ from the lexicographically smallest one the oracle returns.

mod bnb;
mod bound;
mod brute;
pub mod milp;

use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Assignment, CostReport, Mode, Scenario};

pub use bound::lower_bound;
pub use brute::brute_force;
pub use milp::{build_milp, MilpBackend, MilpModel};

/// Default cap on task-to-node maps the oracle will enumerate.
pub const DEFAULT_ENUMERATION_CAP: u64 = 20_000_000;

#[derive(Clone, Debug, Default)]
pub enum Backend {
    #[default]
    Builtin,
    /// Hands the exported MILP to an external solver.
    External(Arc<dyn MilpBackend>),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub mode: Mode,
    pub time_limit: Option<Duration>,
    /// Maximum number of branch-and-bound nodes.
    pub node_limit: Option<u64>,
    pub backend: Backend,
    pub enumeration_cap: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: Mode::QosAware,
            time_limit: None,
            node_limit: None,
            backend: Backend::Builtin,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl SolveOptions {
    pub fn with_mode(mode: Mode) -> Self {
        SolveOptions { mode, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    LimitReached,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::LimitReached => "limit_reached",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub assignment: Option<Assignment>,
    pub report: Option<CostReport>,
    pub nodes_explored: u64,
    pub runtime: Duration,
    /// Valid lower bound on the optimum at termination.
    pub best_bound: f64,
}

/// Finds a minimum-cost assignment under `options.mode`, or proves there is none.
pub fn solve(scenario: &Scenario, options: &SolveOptions) -> Result<SolveOutcome> {
    match &options.backend {
        Backend::Builtin => bnb::solve(scenario, options),
        Backend::External(backend) => milp::solve_external(scenario, options, backend.as_ref()),
    }
}
