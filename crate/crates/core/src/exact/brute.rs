use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use super::{SolveOptions, SolveOutcome, SolveStatus};
use crate::error::{Error, Result};
use crate::model::{evaluate_objective, Assignment, NodeId, Scenario, TaskId};
use crate::timing;

/// Exhaustive search over all `|nodes|^|T|` task-to-node maps.
///
/// Maps are visited in lexicographic order (task 0 most significant, node ids
/// ascending) and only a strictly cheaper map replaces the incumbent, so ties
/// resolve to the lexicographically smallest schedule. Placements are the ones
/// the schedule induces. Totals are summed in the same order as
/// [`evaluate_objective`], making them bitwise comparable with its output.
pub fn brute_force(scenario: &Scenario, options: &SolveOptions) -> Result<SolveOutcome> {
    let start = Instant::now();
    let n = scenario.nodes.len();
    let tasks = &scenario.tasks;
    let combinations = (n as f64).powi(tasks.len() as i32);
    if combinations > options.enumeration_cap as f64 {
        return Err(Error::InstanceTooLarge { combinations, cap: options.enumeration_cap });
    }

    let allowed: Vec<Vec<bool>> = tasks
        .iter()
        .map(|t| {
            scenario
                .nodes
                .iter()
                .map(|node| timing::admits(options.mode, t, node.id, &scenario.distances))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let cost: Vec<Vec<f64>> = tasks
        .iter()
        .map(|t| scenario.nodes.iter().map(|node| scenario.schedule_cost(t, node.id)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let mut digits = vec![0usize; tasks.len()];
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut visited = 0u64;
    loop {
        visited += 1;
        if let Some(total) = price(scenario, &digits, &allowed, &cost) {
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, digits.clone()));
            }
        }
        // odometer increment, last task fastest
        let mut i = tasks.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
        }
        if digits.iter().all(|&d| d == 0) {
            break;
        }
    }

    let runtime = start.elapsed();
    match best {
        None => Ok(SolveOutcome {
            status: SolveStatus::Infeasible,
            assignment: None,
            report: None,
            nodes_explored: visited,
            runtime,
            best_bound: f64::INFINITY,
        }),
        Some((_, digits)) => {
            let schedules: BTreeMap<TaskId, NodeId> =
                digits.iter().enumerate().map(|(t, &j)| (TaskId(t), NodeId(j))).collect();
            let assignment = Assignment::from_schedules(scenario, schedules)?;
            let report = evaluate_objective(scenario, &assignment)?;
            Ok(SolveOutcome {
                status: SolveStatus::Optimal,
                best_bound: report.total,
                assignment: Some(assignment),
                report: Some(report),
                nodes_explored: visited,
                runtime,
            })
        }
    }
}

/// Total cost of a complete map, or `None` if it breaks a constraint.
fn price(scenario: &Scenario, digits: &[usize], allowed: &[Vec<bool>], cost: &[Vec<f64>]) -> Option<f64> {
    let n = scenario.nodes.len();
    let mut compute = vec![0.0; n];
    let mut placements = BTreeSet::new();
    for (t, &j) in digits.iter().enumerate() {
        if !allowed[t][j] {
            return None;
        }
        let task = &scenario.tasks[t];
        compute[j] += task.compute_time;
        if !scenario.nodes[j].is_cloud() {
            placements.insert((task.service, NodeId(j)));
        }
    }
    let mut storage = vec![0.0; n];
    for &(s, j) in &placements {
        storage[j.0] += scenario.services[s.0].storage_demand;
    }
    for node in &scenario.nodes {
        if !node.compute_capacity.admits(compute[node.id.0]) || !node.storage_capacity.admits(storage[node.id.0]) {
            return None;
        }
    }
    let mut placement_cost = 0.0;
    for &(s, j) in &placements {
        placement_cost += scenario.services[s.0].placement_cost[&j];
    }
    let mut scheduling_cost = 0.0;
    for (t, &j) in digits.iter().enumerate() {
        scheduling_cost += cost[t][j];
    }
    Some(placement_cost + scheduling_cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Mode, ScenarioBuilder};

    #[test]
    fn picks_cheaper_node() {
        let mut b = ScenarioBuilder::new();
        let c = b.cloudlet(10.0, 10.0, [0.0, 0.0]);
        // cloudlet: placement 2 + schedule 4 = 6; cloud: 4
        let s = b.service(1.0, vec![2.0], vec![4.0], 4.0);
        b.task(s, c, 1.0, 1.0, 1.0, 10.0);
        let sc = b.build().unwrap();
        let out = brute_force(&sc, &SolveOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.report.unwrap().total, 4.0);
        assert_eq!(out.assignment.unwrap().schedules[&TaskId(0)], sc.cloud());
    }

    #[test]
    fn empty_instance() {
        let mut b = ScenarioBuilder::new();
        b.cloudlet(1.0, 1.0, [0.0, 0.0]);
        let sc = b.build().unwrap();
        let out = brute_force(&sc, &SolveOptions::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.report.unwrap().total, 0.0);
    }

    #[test]
    fn ties_resolve_lexicographically() {
        let mut b = ScenarioBuilder::new();
        let c0 = b.cloudlet(10.0, 10.0, [0.0, 0.0]);
        b.cloudlet(10.0, 10.0, [0.0, 0.0]);
        b.cloud_distance(100.0);
        let s = b.service(1.0, vec![1.0, 1.0], vec![1.0, 1.0], 1.0);
        b.task(s, c0, 1.0, 1.0, 1.0, 1.0);
        let sc = b.build().unwrap();
        // both cloudlets sit at distance 0 from each other
        let out = brute_force(&sc, &SolveOptions::default()).unwrap();
        assert_eq!(out.assignment.unwrap().schedules[&TaskId(0)], NodeId(0));
    }

    #[test]
    fn infeasible_and_too_large() {
        let mut b = ScenarioBuilder::new();
        let c = b.cloudlet(10.0, 1.0, [0.0, 0.0]);
        b.cloud_distance(100.0);
        let s = b.service(1.0, vec![1.0], vec![1.0], 1.0);
        b.task(s, c, 1.0, 1.0, 2.0, 3.0);
        let sc = b.build().unwrap();
        assert_eq!(brute_force(&sc, &SolveOptions::default()).unwrap().status, SolveStatus::Infeasible);
        let relaxed = brute_force(&sc, &SolveOptions::with_mode(Mode::QosLess)).unwrap();
        assert_eq!(relaxed.status, SolveStatus::Optimal);
        assert_eq!(relaxed.report.unwrap().drop_count, 1);

        let opts = SolveOptions { enumeration_cap: 1, ..Default::default() };
        assert!(matches!(brute_force(&sc, &opts), Err(Error::InstanceTooLarge { .. })));
    }
}
