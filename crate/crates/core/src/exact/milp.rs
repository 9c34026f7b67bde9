//! Standard-form MILP export and the external-solver adapter.
//!
//! The exported document lists columns, rows and the nonzero coefficients as
//! `(row, column, value)` triplets:
//!
//! * `x_{m}_{j}`: service `m` placed on cloudlet `j` (requested services only),
//!   objective `P^p_mj`.
//! * `y_{t}_{j}`: task `t` runs on node `j`, objective `P^s_{M(t)j}`.
//! * `storage_{j}`: `Σ_m H_m x_mj ≤ S_j` per cloudlet.
//! * `compute_{j}`: `Σ_t σ(t) y_tj ≤ W_j` per cloudlet.
//! * `assign_{t}`: `Σ_j y_tj = 1`.
//! * `deadline_{t}_{j}`: `δ(t, j) y_tj ≤ Q_t` (deadline-aware mode only).
//! * `link_{t}_{j}`: `y_tj − x_{M(t)j} ≤ 0` per cloudlet.
//!
//! All columns are binary: bounds `[0, 1]` with `integer = true`.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{SolveOptions, SolveOutcome, SolveStatus};
use crate::error::{Error, Result};
use crate::model::{evaluate_objective, Assignment, Mode, NodeId, Scenario, ServiceId, TaskId};
use crate::timing;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarRole {
    Place { service: ServiceId, node: NodeId },
    Schedule { task: TaskId, node: NodeId },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MilpVariable {
    pub name: String,
    pub role: VarRole,
    pub objective: f64,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    #[serde(rename = "<=")]
    LessEqual,
    #[serde(rename = "=")]
    Equal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MilpRow {
    pub name: String,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MilpModel {
    pub sense: String,
    pub variables: Vec<MilpVariable>,
    pub rows: Vec<MilpRow>,
    /// `(row, column, coefficient)`
    pub entries: Vec<(usize, usize, f64)>,
}

impl MilpModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Objective value of a column vector.
    pub fn objective(&self, values: &[f64]) -> f64 {
        self.variables.iter().zip(values).map(|(v, x)| v.objective * x).sum()
    }
}

/// Result reported by an external solver: one value per column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MilpSolution {
    pub status: SolveStatus,
    pub values: Vec<f64>,
    /// Best proven lower bound, if the solver reports one.
    pub bound: Option<f64>,
}

/// An external MILP solver.
pub trait MilpBackend: Send + Sync + fmt::Debug {
    fn solve(&self, model: &MilpModel) -> Result<MilpSolution>;
}

pub fn build_milp(scenario: &Scenario, mode: Mode) -> Result<MilpModel> {
    let mut variables = Vec::new();
    let mut rows = Vec::new();
    let mut entries = Vec::new();
    let cloudlets: Vec<NodeId> = scenario.cloudlets().map(|n| n.id).collect();

    let mut x_col = BTreeMap::new();
    for s in scenario.requested_services() {
        let spec = scenario.service(s)?;
        for &j in &cloudlets {
            x_col.insert((s, j), variables.len());
            variables.push(MilpVariable {
                name: format!("x_{s}_{j}"),
                role: VarRole::Place { service: s, node: j },
                objective: spec.placement_cost[&j],
                lower: 0.0,
                upper: 1.0,
                integer: true,
            });
        }
    }
    let mut y_col = BTreeMap::new();
    for task in &scenario.tasks {
        for node in &scenario.nodes {
            y_col.insert((task.id, node.id), variables.len());
            variables.push(MilpVariable {
                name: format!("y_{}_{}", task.id, node.id),
                role: VarRole::Schedule { task: task.id, node: node.id },
                objective: scenario.schedule_cost(task, node.id)?,
                lower: 0.0,
                upper: 1.0,
                integer: true,
            });
        }
    }

    let row = |name: String, sense, rhs, rows: &mut Vec<MilpRow>| {
        rows.push(MilpRow { name, sense, rhs });
        rows.len() - 1
    };

    for &j in &cloudlets {
        let node = scenario.node(j)?;
        let r = row(format!("storage_{j}"), RowSense::LessEqual, node.storage_capacity.finite().unwrap_or(f64::INFINITY), &mut rows);
        for (&(s, jj), &col) in &x_col {
            if jj == j {
                entries.push((r, col, scenario.services[s.0].storage_demand));
            }
        }
    }
    for &j in &cloudlets {
        let node = scenario.node(j)?;
        let r = row(format!("compute_{j}"), RowSense::LessEqual, node.compute_capacity.finite().unwrap_or(f64::INFINITY), &mut rows);
        for task in &scenario.tasks {
            entries.push((r, y_col[&(task.id, j)], task.compute_time));
        }
    }
    for task in &scenario.tasks {
        let r = row(format!("assign_{}", task.id), RowSense::Equal, 1.0, &mut rows);
        for node in &scenario.nodes {
            entries.push((r, y_col[&(task.id, node.id)], 1.0));
        }
    }
    if mode == Mode::QosAware {
        for task in &scenario.tasks {
            for node in &scenario.nodes {
                let delay = timing::completion_time(task, node.id, &scenario.distances)?;
                let r = row(format!("deadline_{}_{}", task.id, node.id), RowSense::LessEqual, task.qos_deadline, &mut rows);
                entries.push((r, y_col[&(task.id, node.id)], delay));
            }
        }
    }
    for task in &scenario.tasks {
        for &j in &cloudlets {
            let r = row(format!("link_{}_{j}", task.id), RowSense::LessEqual, 0.0, &mut rows);
            entries.push((r, y_col[&(task.id, j)], 1.0));
            entries.push((r, x_col[&(task.service, j)], -1.0));
        }
    }

    Ok(MilpModel { sense: "minimize".into(), variables, rows, entries })
}

/// Turns column values back into an assignment (values above 0.5 count as 1).
pub fn decode(model: &MilpModel, values: &[f64]) -> Result<Assignment> {
    if values.len() != model.variables.len() {
        return Err(Error::InvalidAssignment(format!(
            "solver returned {} values for {} columns",
            values.len(),
            model.variables.len()
        )));
    }
    let mut out = Assignment::default();
    for (var, &x) in model.variables.iter().zip(values) {
        if x <= 0.5 {
            continue;
        }
        match var.role {
            VarRole::Place { service, node } => {
                out.placements.insert((service, node));
            }
            VarRole::Schedule { task, node } => {
                if out.schedules.insert(task, node).is_some() {
                    return Err(Error::InvalidAssignment(format!("task {task} scheduled more than once")));
                }
            }
        }
    }
    Ok(out)
}

pub(super) fn solve_external(scenario: &Scenario, options: &SolveOptions, backend: &dyn MilpBackend) -> Result<SolveOutcome> {
    let start = Instant::now();
    let model = build_milp(scenario, options.mode)?;
    let solution = backend.solve(&model)?;
    let decoded = match solution.status {
        SolveStatus::Infeasible => None,
        _ if solution.values.len() != model.variables.len() && solution.values.is_empty() => None,
        _ => Some(decode(&model, &solution.values)?),
    };
    let report = decoded.as_ref().map(|a| evaluate_objective(scenario, a)).transpose()?;
    let best_bound = match (solution.status, &report) {
        (SolveStatus::Optimal, Some(r)) => r.total,
        (SolveStatus::Infeasible, _) => f64::INFINITY,
        _ => solution.bound.unwrap_or(f64::NEG_INFINITY),
    };
    Ok(SolveOutcome {
        status: solution.status,
        assignment: decoded,
        report,
        nodes_explored: 0,
        runtime: start.elapsed(),
        best_bound,
    })
}
