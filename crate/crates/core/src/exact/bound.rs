use std::collections::BTreeMap;

use crate::error::Result;
use crate::model::{induced_placements, Mode, NodeId, Scenario, TaskId};
use crate::timing;

/// Combinatorial lower bound for any completion of `partial`.
///
/// Cost of the partial schedule (including the placements it induces) plus,
/// for every unassigned task, its cheapest scheduling cost over the nodes
/// admitted by `mode`. Unpaid placements contribute nothing. Returns infinity
/// when some unassigned task has no admissible node.
pub fn lower_bound(scenario: &Scenario, partial: &BTreeMap<TaskId, NodeId>, mode: Mode) -> Result<f64> {
    let mut bound = 0.0;
    for (s, j) in induced_placements(scenario, partial)? {
        bound += scenario.services[s.0].placement_cost[&j];
    }
    for (&t, &j) in partial {
        bound += scenario.schedule_cost(scenario.task(t)?, j)?;
    }
    for task in scenario.tasks.iter().filter(|t| !partial.contains_key(&t.id)) {
        let mut cheapest = f64::INFINITY;
        for node in &scenario.nodes {
            if timing::admits(mode, task, node.id, &scenario.distances)? {
                cheapest = cheapest.min(scenario.schedule_cost(task, node.id)?);
            }
        }
        bound += cheapest;
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate_objective, Assignment, ScenarioBuilder};

    #[test]
    fn single_task_takes_cheapest_node() {
        let mut b = ScenarioBuilder::new();
        let c = b.cloudlet(10.0, 10.0, [0.0, 0.0]);
        let s = b.service(1.0, vec![5.0], vec![3.0], 2.0);
        b.task(s, c, 1.0, 1.0, 1.0, 10.0);
        let sc = b.build().unwrap();
        assert_eq!(lower_bound(&sc, &BTreeMap::new(), Mode::QosAware).unwrap(), 2.0);
    }

    #[test]
    fn full_partial_is_exact_objective() {
        let mut b = ScenarioBuilder::new();
        let c = b.cloudlet(10.0, 10.0, [0.0, 0.0]);
        let s = b.service(1.0, vec![5.0], vec![3.0], 2.0);
        let t0 = b.task(s, c, 1.0, 1.0, 1.0, 10.0);
        let t1 = b.task(s, c, 1.0, 1.0, 1.0, 10.0);
        let sc = b.build().unwrap();
        let partial = BTreeMap::from([(t0, c), (t1, sc.cloud())]);
        let a = Assignment::from_schedules(&sc, partial.clone()).unwrap();
        let total = evaluate_objective(&sc, &a).unwrap().total;
        assert_eq!(total, 10.0);
        assert_eq!(lower_bound(&sc, &partial, Mode::QosAware).unwrap(), total);
    }

    #[test]
    fn deadline_filters_nodes() {
        let mut b = ScenarioBuilder::new();
        let c = b.cloudlet(10.0, 10.0, [0.0, 0.0]);
        b.cloud_distance(10.0);
        let s = b.service(1.0, vec![5.0], vec![3.0], 2.0);
        b.task(s, c, 1.0, 1.0, 1.0, 10.0);
        let sc = b.build().unwrap();
        assert_eq!(lower_bound(&sc, &BTreeMap::new(), Mode::QosAware).unwrap(), 3.0);
        assert_eq!(lower_bound(&sc, &BTreeMap::new(), Mode::QosLess).unwrap(), 2.0);
    }
}
