#![allow(dead_code)]

use edgesched_core::{Capacity, NodeId, Scenario, ScenarioBuilder, TaskId};
use proptest::prelude::*;

/// Integer-valued tiny instance description. Integer data keeps every float
/// sum exact, so solver totals can be compared with `==`.
#[derive(Clone, Debug)]
pub struct Tiny {
    pub cloudlets: Vec<(u8, u8)>,
    pub cloudlet_gap: u8,
    pub cloud_distance: u8,
    /// (H, placement per cloudlet, schedule per cloudlet, cloud schedule)
    pub services: Vec<(u8, Vec<u8>, Vec<u8>, u8)>,
    /// (service, local cloudlet, in, out, σ, deadline slack)
    pub tasks: Vec<(usize, usize, u8, u8, u8, u8)>,
}

impl Tiny {
    pub fn build(&self) -> Scenario {
        let mut b = ScenarioBuilder::new();
        let k = self.cloudlets.len();
        for &(storage, compute) in &self.cloudlets {
            b.cloudlet(storage as f64, compute as f64, [0.0, 0.0]);
        }
        let mut rows = vec![vec![0.0; k + 1]; k + 1];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, d) in row.iter_mut().enumerate() {
                *d = match (i == j, i == k || j == k) {
                    (true, _) => 0.0,
                    (false, true) => self.cloud_distance as f64,
                    (false, false) => self.cloudlet_gap as f64,
                };
            }
        }
        b.distances(rows);
        for (h, p, s, c) in &self.services {
            b.service(
                *h as f64,
                p.iter().map(|&x| x as f64).collect(),
                s.iter().map(|&x| x as f64).collect(),
                *c as f64,
            );
        }
        for &(svc, local, tin, tout, sigma, slack) in &self.tasks {
            let svc = edgesched_core::ServiceId(svc % self.services.len());
            let sigma = sigma as f64;
            b.task(svc, NodeId(local % k), tin as f64, tout as f64, sigma, sigma + slack as f64);
        }
        b.build().expect("tiny scenario is valid")
    }
}

/// Two cloudlets plus the cloud, up to `max_tasks` tasks and 4 services.
pub fn tiny(max_tasks: usize) -> impl Strategy<Value = Tiny> {
    let k = 2usize;
    (1usize..=4).prop_flat_map(move |m| {
        (
            prop::collection::vec((0u8..=6, 0u8..=10), k),
            0u8..=2,
            0u8..=3,
            prop::collection::vec(
                (1u8..=3, prop::collection::vec(0u8..=5, k), prop::collection::vec(0u8..=8, k), 0u8..=6),
                m,
            ),
            prop::collection::vec((0..m, 0..k, 1u8..=3, 1u8..=3, 1u8..=4, 0u8..=12), 0..=max_tasks),
        )
            .prop_map(|(cloudlets, cloudlet_gap, cloud_distance, services, tasks)| Tiny {
                cloudlets,
                cloudlet_gap,
                cloud_distance,
                services,
                tasks,
            })
    })
}

/// Same scenario with tasks listed in `order` (a permutation) and renumbered.
pub fn permute_tasks(scenario: &Scenario, order: &[usize]) -> Scenario {
    let mut out = scenario.clone();
    out.tasks = order
        .iter()
        .enumerate()
        .map(|(new, &old)| {
            let mut t = scenario.tasks[old].clone();
            t.id = TaskId(new);
            t
        })
        .collect();
    out
}

/// Same scenario with every cloudlet capacity raised by `extra`.
pub fn widen(scenario: &Scenario, extra_storage: f64, extra_compute: f64) -> Scenario {
    let mut out = scenario.clone();
    for node in out.nodes.iter_mut().filter(|n| !n.is_cloud()) {
        if let Capacity::Finite(s) = node.storage_capacity {
            node.storage_capacity = Capacity::Finite(s + extra_storage);
        }
        if let Capacity::Finite(w) = node.compute_capacity {
            node.compute_capacity = Capacity::Finite(w + extra_compute);
        }
    }
    out
}
