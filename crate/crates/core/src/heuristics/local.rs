use crate::model::{Assignment, Scenario, Task};
use crate::timing;

use super::NodeBudget;

/// Local Serving: each cloudlet, in ascending id order, serves its own users.
///
/// Per cloudlet: take the attached task with the tightest deadline whose
/// service can still be hosted and whose compute still fits, install its
/// service, then schedule every other attached task of that service that
/// fits, tightest deadline first. Repeat until no attached task fits. Leftover
/// tasks go to the cloud when it meets their deadline and are unserved otherwise.
pub fn local_serving(scenario: &Scenario) -> Assignment {
    let cloud = scenario.cloud();
    let mut budgets = NodeBudget::for_scenario(scenario);
    let mut scheduled = vec![false; scenario.tasks.len()];
    let mut out = Assignment::default();

    for cloudlet in scenario.cloudlets() {
        let budget = &mut budgets[cloudlet.id.0];
        let mut attached: Vec<&Task> = scenario
            .tasks
            .iter()
            .filter(|t| t.local_node == cloudlet.id)
            .filter(|t| timing::is_feasible(t, cloudlet.id, &scenario.distances).unwrap_or(false))
            .collect();
        attached.sort_by(|a, b| a.qos_deadline.total_cmp(&b.qos_deadline).then(a.id.cmp(&b.id)));

        loop {
            let pick = attached.iter().find(|t| {
                !scheduled[t.id.0]
                    && budget.fits(t.compute_time)
                    && budget.can_host(t.service, scenario.services[t.service.0].storage_demand)
            });
            let Some(&first) = pick else { break };
            let service = first.service;
            if budget.place(service, scenario.services[service.0].storage_demand) {
                out.placements.insert((service, cloudlet.id));
            }
            for t in attached.iter().filter(|t| t.service == service) {
                if !scheduled[t.id.0] && budget.fits(t.compute_time) {
                    budget.consume(t);
                    scheduled[t.id.0] = true;
                    out.schedules.insert(t.id, cloudlet.id);
                }
            }
        }
    }

    for task in &scenario.tasks {
        if scheduled[task.id.0] {
            continue;
        }
        if timing::is_feasible(task, cloud, &scenario.distances).unwrap_or(false) {
            out.schedules.insert(task.id, cloud);
        } else {
            out.unserved.insert(task.id);
        }
    }
    out
}
