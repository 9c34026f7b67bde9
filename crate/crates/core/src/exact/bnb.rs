//! Depth-first branch-and-bound over task-to-node choices.
//!
//! Preprocessing fixes every task whose cheapest admissible node is the cloud:
//! the cloud has unbounded capacity and no placement cost, so moving such a
//! task there never raises the cost of a feasible solution. The remaining
//! tasks are branched on, fewest candidate nodes first.
//!
//! The bound at a search node is the cost so far plus, for each open task, the
//! cheapest scheduling cost among nodes it can still use, plus one placement
//! cost for every service whose open tasks can only run where it is not yet
//! placed. The same pass prunes nodes where storage or compute provably runs out.

use std::collections::BTreeMap;
use std::time::Instant;

use super::{SolveOptions, SolveOutcome, SolveStatus};
use crate::error::Result;
use crate::heuristics;
use crate::model::{evaluate_objective, validate, Assignment, NodeId, Scenario, TaskId};
use crate::timing;

struct Candidate {
    node: usize,
    cost: f64,
}

struct OpenTask {
    id: TaskId,
    service: usize,
    compute: f64,
    candidates: Vec<Candidate>,
}

struct ServiceInfo {
    storage: f64,
    placement: Vec<f64>,
}

struct Search {
    cloud: usize,
    tasks: Vec<OpenTask>,
    services: Vec<ServiceInfo>,
    rem_storage: Vec<f64>,
    rem_compute: Vec<f64>,
    placed: Vec<Vec<u32>>,
    choice: Vec<usize>,
    cost: f64,
    best_cost: f64,
    best: Option<Vec<usize>>,
    nodes: u64,
    node_limit: u64,
    deadline: Option<Instant>,
    aborted: bool,
    // scratch for the bound, indexed by dense service id
    has_free: Vec<bool>,
    min_new: Vec<f64>,
    touched: Vec<usize>,
}

fn cutoff(best: f64) -> f64 {
    if best.is_infinite() {
        return best;
    }
    best - 1e-9 * best.abs().max(1.0)
}

impl Search {
    fn usable(&self, task: &OpenTask, node: usize) -> bool {
        if node == self.cloud {
            return true;
        }
        task.compute <= self.rem_compute[node]
            && (self.placed[task.service][node] > 0 || self.services[task.service].storage <= self.rem_storage[node])
    }

    fn bound(&mut self, depth: usize) -> Option<f64> {
        let mut lb = self.cost;
        let mut cloudlet_only = 0.0;
        let mut feasible = true;
        for i in depth..self.tasks.len() {
            let task = &self.tasks[i];
            let s = task.service;
            let mut cheapest = f64::INFINITY;
            let mut free = false;
            let mut cloud_ok = false;
            let mut new_placement = f64::INFINITY;
            for c in task.candidates.iter().filter(|c| self.usable(task, c.node)) {
                cheapest = cheapest.min(c.cost);
                if c.node == self.cloud {
                    cloud_ok = true;
                    free = true;
                } else if self.placed[s][c.node] > 0 {
                    free = true;
                } else {
                    new_placement = new_placement.min(self.services[s].placement[c.node]);
                }
            }
            if cheapest == f64::INFINITY {
                feasible = false;
                break;
            }
            lb += cheapest;
            if !cloud_ok {
                cloudlet_only += task.compute;
            }
            if !self.touched.contains(&s) {
                self.touched.push(s);
            }
            self.has_free[s] |= free;
            self.min_new[s] = self.min_new[s].min(new_placement);
        }

        let mut needed_storage = 0.0;
        for &s in &self.touched {
            if !self.has_free[s] {
                lb += self.min_new[s];
                needed_storage += self.services[s].storage;
            }
            self.has_free[s] = false;
            self.min_new[s] = f64::INFINITY;
        }
        self.touched.clear();
        if !feasible {
            return None;
        }

        let cloudlets = (0..self.rem_storage.len()).filter(|&j| j != self.cloud);
        let (storage_left, compute_left) =
            cloudlets.fold((0.0, 0.0), |(s, c), j| (s + self.rem_storage[j], c + self.rem_compute[j]));
        if needed_storage > storage_left || cloudlet_only > compute_left {
            return None;
        }
        Some(lb)
    }

    fn limits_hit(&mut self) -> bool {
        if self.nodes > self.node_limit {
            self.aborted = true;
        } else if self.nodes.is_multiple_of(1024) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.aborted = true;
                }
            }
        }
        self.aborted
    }

    fn dfs(&mut self, depth: usize) {
        self.nodes += 1;
        if self.limits_hit() {
            return;
        }
        if depth == self.tasks.len() {
            if self.cost < cutoff(self.best_cost) {
                self.best_cost = self.cost;
                self.best = Some(self.choice.clone());
            }
            return;
        }
        let Some(lb) = self.bound(depth) else { return };
        if lb >= cutoff(self.best_cost) {
            return;
        }

        let task = &self.tasks[depth];
        let s = task.service;
        let sigma = task.compute;
        let mut options: Vec<(f64, usize, bool)> = task
            .candidates
            .iter()
            .filter(|c| self.usable(task, c.node))
            .map(|c| {
                let new = c.node != self.cloud && self.placed[s][c.node] == 0;
                let extra = if new { self.services[s].placement[c.node] } else { 0.0 };
                (c.cost + extra, c.node, new)
            })
            .collect();
        options.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        for (increment, j, new) in options {
            let saved = (self.cost, self.rem_storage[j], self.rem_compute[j]);
            self.cost += increment;
            if new {
                self.rem_storage[j] -= self.services[s].storage;
            }
            if j != self.cloud {
                self.rem_compute[j] -= sigma;
            }
            self.placed[s][j] += 1;
            self.choice[depth] = j;

            self.dfs(depth + 1);

            self.placed[s][j] -= 1;
            (self.cost, self.rem_storage[j], self.rem_compute[j]) = saved;
            if self.aborted {
                return;
            }
        }
    }
}

/// Best complete heuristic assignment that is feasible under the active mode.
fn heuristic_incumbent(scenario: &Scenario, options: &SolveOptions) -> Result<Option<(f64, Assignment)>> {
    let mut best: Option<(f64, Assignment)> = None;
    for candidate in [heuristics::global_serving(scenario), heuristics::local_serving(scenario)] {
        if !candidate.unserved.is_empty() || candidate.schedules.len() != scenario.tasks.len() {
            continue;
        }
        let clean = validate(scenario, &candidate).iter().all(|v| !options.mode.enforces(v.constraint));
        if !clean {
            continue;
        }
        let total = evaluate_objective(scenario, &candidate)?.total;
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, candidate));
        }
    }
    Ok(best)
}

pub(super) fn solve(scenario: &Scenario, options: &SolveOptions) -> Result<SolveOutcome> {
    let start = Instant::now();
    let cloud = scenario.cloud();
    let n = scenario.nodes.len();

    let infeasible = |nodes| SolveOutcome {
        status: SolveStatus::Infeasible,
        assignment: None,
        report: None,
        nodes_explored: nodes,
        runtime: start.elapsed(),
        best_bound: f64::INFINITY,
    };

    let mut dense_service = BTreeMap::new();
    let mut services = Vec::new();
    let mut fixed = BTreeMap::new();
    let mut base_cost = 0.0;
    let mut open = Vec::new();
    for task in &scenario.tasks {
        let mut candidates = Vec::new();
        for node in &scenario.nodes {
            if timing::admits(options.mode, task, node.id, &scenario.distances)? {
                candidates.push(Candidate { node: node.id.0, cost: scenario.schedule_cost(task, node.id)? });
            }
        }
        if candidates.is_empty() {
            return Ok(infeasible(0));
        }
        let cloud_cost = candidates.iter().find(|c| c.node == cloud.0).map(|c| c.cost);
        if let Some(cc) = cloud_cost {
            if candidates.iter().all(|c| cc <= c.cost) {
                fixed.insert(task.id, cloud);
                base_cost += cc;
                continue;
            }
        }
        candidates.sort_by(|a, b| a.cost.total_cmp(&b.cost).then(a.node.cmp(&b.node)));
        let service = *dense_service.entry(task.service).or_insert_with(|| {
            let spec = &scenario.services[task.service.0];
            let placement = (0..n).map(|j| spec.placement_cost.get(&NodeId(j)).copied().unwrap_or(0.0)).collect();
            services.push(ServiceInfo { storage: spec.storage_demand, placement });
            services.len() - 1
        });
        open.push(OpenTask { id: task.id, service, compute: task.compute_time, candidates });
    }
    open.sort_by(|a, b| {
        a.candidates
            .len()
            .cmp(&b.candidates.len())
            .then(b.compute.total_cmp(&a.compute))
            .then(a.id.cmp(&b.id))
    });

    let incumbent = if open.is_empty() { None } else { heuristic_incumbent(scenario, options)? };
    let capacity = |c: crate::model::Capacity| c.finite().unwrap_or(f64::INFINITY);
    let n_services = services.len();
    let mut search = Search {
        cloud: cloud.0,
        choice: vec![0; open.len()],
        tasks: open,
        services,
        rem_storage: scenario.nodes.iter().map(|node| capacity(node.storage_capacity)).collect(),
        rem_compute: scenario.nodes.iter().map(|node| capacity(node.compute_capacity)).collect(),
        placed: vec![vec![0; n]; n_services],
        cost: base_cost,
        best_cost: incumbent.as_ref().map_or(f64::INFINITY, |(c, _)| *c),
        best: None,
        nodes: 0,
        node_limit: options.node_limit.unwrap_or(u64::MAX),
        deadline: options.time_limit.map(|d| start + d),
        aborted: false,
        has_free: vec![false; n_services],
        min_new: vec![f64::INFINITY; n_services],
        touched: Vec::new(),
    };
    let root_bound = search.bound(0);
    if root_bound.is_some() {
        search.dfs(0);
    }

    let assignment = match (&search.best, incumbent) {
        (Some(choice), _) => {
            let mut schedules = fixed;
            for (task, &j) in search.tasks.iter().zip(choice) {
                schedules.insert(task.id, NodeId(j));
            }
            Some(Assignment::from_schedules(scenario, schedules)?)
        }
        (None, Some((_, a))) => Some(Assignment::from_schedules(scenario, a.schedules)?),
        (None, None) => None,
    };

    let Some(assignment) = assignment else {
        if search.aborted {
            return Ok(SolveOutcome {
                status: SolveStatus::LimitReached,
                assignment: None,
                report: None,
                nodes_explored: search.nodes,
                runtime: start.elapsed(),
                best_bound: root_bound.unwrap_or(f64::INFINITY),
            });
        }
        return Ok(infeasible(search.nodes));
    };
    let report = evaluate_objective(scenario, &assignment)?;
    let (status, best_bound) = if search.aborted {
        (SolveStatus::LimitReached, root_bound.unwrap_or(report.total).min(report.total))
    } else {
        (SolveStatus::Optimal, report.total)
    };
    debug_assert!(report.violations.iter().all(|v| !options.mode.enforces(v.constraint)));
    Ok(SolveOutcome {
        status,
        assignment: Some(assignment),
        report: Some(report),
        nodes_explored: search.nodes,
        runtime: start.elapsed(),
        best_bound,
    })
}
