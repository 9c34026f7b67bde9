use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{Assignment, NodeId, Scenario, ServiceId, TaskId};
use crate::timing;

use super::NodeBudget;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GlobalOptions {
    /// Divisor applied to the cloud's task count, which has no placement cost.
    pub cloud_profit_divisor: f64,
    /// Treat a service already placed on a cloudlet as costing nothing to reuse.
    pub reuse_is_free: bool,
}

impl Default for GlobalOptions {
    fn default() -> Self {
        GlobalOptions { cloud_profit_divisor: 1.0, reuse_is_free: false }
    }
}

/// Global Serving with default options.
pub fn global_serving(scenario: &Scenario) -> Assignment {
    global_serving_with(scenario, &GlobalOptions::default())
}

struct Pick {
    profit: f64,
    node: NodeId,
    service: ServiceId,
    tasks: Vec<TaskId>,
}

/// Global Serving: repeatedly commit the (service, node) pair with the highest profit.
///
/// A pair's count is the number of pending tasks of that service that meet
/// their deadline on the node and fit its remaining compute, packed smallest
/// compute time first. Profit is the count divided by the placement cost
/// (by `cloud_profit_divisor` for the cloud). Cloudlets that can no longer
/// store the service are skipped. When no pair can serve anything, the
/// remaining tasks are unserved.
pub fn global_serving_with(scenario: &Scenario, options: &GlobalOptions) -> Assignment {
    let cloud = scenario.cloud();
    let mut budgets = NodeBudget::for_scenario(scenario);
    let mut out = Assignment::default();

    let feasible: Vec<Vec<bool>> = scenario
        .tasks
        .iter()
        .map(|t| {
            scenario
                .nodes
                .iter()
                .map(|n| timing::is_feasible(t, n.id, &scenario.distances).unwrap_or(false))
                .collect()
        })
        .collect();

    let mut pending: BTreeMap<ServiceId, Vec<TaskId>> = BTreeMap::new();
    for t in &scenario.tasks {
        pending.entry(t.service).or_default().push(t.id);
    }
    for tasks in pending.values_mut() {
        tasks.sort_by(|&a, &b| {
            let (a, b) = (&scenario.tasks[a.0], &scenario.tasks[b.0]);
            a.compute_time.total_cmp(&b.compute_time).then(a.id.cmp(&b.id))
        });
    }

    let order: Vec<NodeId> = std::iter::once(cloud).chain(scenario.cloudlets().map(|n| n.id)).collect();

    while !pending.is_empty() {
        let mut best: Option<Pick> = None;
        for &node in &order {
            let budget = &budgets[node.0];
            for (&service, tasks) in &pending {
                let spec = &scenario.services[service.0];
                if !budget.can_host(service, spec.storage_demand) {
                    continue;
                }
                let mut room = budget.remaining_compute;
                let mut taken = Vec::new();
                for &t in tasks.iter().filter(|t| feasible[t.0][node.0]) {
                    let sigma = scenario.tasks[t.0].compute_time;
                    if !room.admits(sigma) {
                        break;
                    }
                    room = room.minus(sigma);
                    taken.push(t);
                }
                if taken.is_empty() {
                    continue;
                }
                let divisor = if node == cloud {
                    options.cloud_profit_divisor
                } else if options.reuse_is_free && budget.hosts(service) {
                    0.0
                } else {
                    spec.placement_cost[&node]
                };
                let profit = taken.len() as f64 / divisor;
                if best.as_ref().is_none_or(|b| profit > b.profit) {
                    best = Some(Pick { profit, node, service, tasks: taken });
                }
            }
        }

        let Some(pick) = best else {
            out.unserved.extend(pending.values().flatten().copied());
            break;
        };
        let budget = &mut budgets[pick.node.0];
        if budget.place(pick.service, scenario.services[pick.service.0].storage_demand) {
            out.placements.insert((pick.service, pick.node));
        }
        for &t in &pick.tasks {
            budget.consume(&scenario.tasks[t.0]);
            out.schedules.insert(t, pick.node);
        }
        let remaining = pending.get_mut(&pick.service).expect("picked service is pending");
        remaining.retain(|t| !pick.tasks.contains(t));
        if remaining.is_empty() {
            pending.remove(&pick.service);
        }
    }
    out
}
