//! Greedy placement-and-scheduling heuristics.
//!
//! [`local_serving`] lets every cloudlet serve its own users first and sends
//! the rest to the cloud. [`global_serving`] repeatedly picks the
//! (service, node) pair serving the most tasks per unit of placement cost.
//! Tasks neither heuristic can fit within deadlines end up in
//! [`Assignment::unserved`](crate::model::Assignment) rather than being
//! scheduled late.
//!
//! Ties are always broken the same way: tasks by id, nodes with the cloud
//! first then by id, services by id, cloudlets visited in ascending id.

mod global;
mod local;

use std::collections::BTreeSet;

use crate::model::{Capacity, Node, NodeId, Scenario, ServiceId, Task};

pub use global::{global_serving, global_serving_with, GlobalOptions};
pub use local::local_serving;

/// Capacity left on one node while a heuristic runs.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeBudget {
    pub node: NodeId,
    pub remaining_storage: Capacity,
    pub remaining_compute: Capacity,
    pub placed_services: BTreeSet<ServiceId>,
    is_cloud: bool,
}

impl NodeBudget {
    pub fn new(node: &Node) -> Self {
        NodeBudget {
            node: node.id,
            remaining_storage: node.storage_capacity,
            remaining_compute: node.compute_capacity,
            placed_services: BTreeSet::new(),
            is_cloud: node.is_cloud(),
        }
    }

    pub fn for_scenario(scenario: &Scenario) -> Vec<NodeBudget> {
        scenario.nodes.iter().map(NodeBudget::new).collect()
    }

    /// The cloud hosts everything; a cloudlet only what was placed on it.
    pub fn hosts(&self, service: ServiceId) -> bool {
        self.is_cloud || self.placed_services.contains(&service)
    }

    /// Whether `service` is hosted already or its storage demand still fits.
    pub fn can_host(&self, service: ServiceId, storage_demand: f64) -> bool {
        self.hosts(service) || self.remaining_storage.admits(storage_demand)
    }

    pub fn fits(&self, compute_time: f64) -> bool {
        self.remaining_compute.admits(compute_time)
    }

    /// Installs `service` if needed; returns whether a new placement was made.
    pub fn place(&mut self, service: ServiceId, storage_demand: f64) -> bool {
        if self.hosts(service) {
            return false;
        }
        debug_assert!(self.remaining_storage.admits(storage_demand));
        self.remaining_storage = self.remaining_storage.minus(storage_demand);
        self.placed_services.insert(service);
        true
    }

    pub fn consume(&mut self, task: &Task) {
        debug_assert!(self.fits(task.compute_time));
        self.remaining_compute = self.remaining_compute.minus(task.compute_time);
    }
}
