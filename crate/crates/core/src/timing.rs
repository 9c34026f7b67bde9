//! Completion-time model and deadline feasibility.
//!
//! A task entering the system at its local cloudlet `J(t)` and executed on node
//! `j` finishes after
//!
//! ```text
//! δ(t, j) = d(J(t), j) · t_in + σ(t) + d(J(t), j) · t_out
//! ```
//!
//! where `d` is the one-way per-packet-unit transfer time. Node load plays no
//! part; congestion is modelled only through the compute capacity constraint.

use crate::error::Result;
use crate::model::{DistanceMatrix, Mode, NodeId, Scenario, Task};

pub fn completion_time(task: &Task, target: NodeId, distances: &DistanceMatrix) -> Result<f64> {
    let d = distances.get(task.local_node, target)?;
    Ok(d * task.input_size + task.compute_time + d * task.output_size)
}

/// `δ(t, target) ≤ Q_t`, compared without tolerance.
pub fn is_feasible(task: &Task, target: NodeId, distances: &DistanceMatrix) -> Result<bool> {
    Ok(completion_time(task, target, distances)? <= task.qos_deadline)
}

/// Whether `target` may run `task` under `mode`; every node qualifies when deadlines are ignored.
pub fn admits(mode: Mode, task: &Task, target: NodeId, distances: &DistanceMatrix) -> Result<bool> {
    match mode {
        Mode::QosAware => is_feasible(task, target, distances),
        Mode::QosLess => {
            distances.get(task.local_node, target)?;
            Ok(true)
        }
    }
}

/// Nodes meeting the task's deadline, fastest first (ties by node id).
pub fn feasible_targets(task: &Task, scenario: &Scenario) -> Vec<NodeId> {
    let mut out: Vec<(f64, NodeId)> = scenario
        .nodes
        .iter()
        .filter_map(|n| {
            let delay = completion_time(task, n.id, &scenario.distances).ok()?;
            (delay <= task.qos_deadline).then_some((delay, n.id))
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    out.into_iter().map(|(_, id)| id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ScenarioBuilder, ServiceId, TaskId};

    fn task(input: f64, output: f64, sigma: f64, deadline: f64) -> Task {
        Task {
            id: TaskId(0),
            service: ServiceId(0),
            local_node: NodeId(0),
            input_size: input,
            output_size: output,
            compute_time: sigma,
            qos_deadline: deadline,
        }
    }

    /// Cloud distance under the default generator: 5 · (100·√2) · 0.001.
    fn default_cloud_distance() -> f64 {
        5.0 * (100.0 * 2f64.sqrt()) * 0.001
    }

    fn two_nodes(d: f64) -> DistanceMatrix {
        DistanceMatrix::from_rows(vec![vec![0.0, d], vec![d, 0.0]])
    }

    #[test]
    fn local_execution_is_pure_compute() {
        let m = two_nodes(0.3);
        assert_eq!(completion_time(&task(2.0, 4.0, 3.0, 9.0), NodeId(0), &m).unwrap(), 3.0);
    }

    #[test]
    fn direct_evaluation() {
        let m = two_nodes(0.1);
        let delay = completion_time(&task(2.0, 2.0, 2.0, 5.0), NodeId(1), &m).unwrap();
        assert!((delay - 2.4).abs() < 1e-12);
    }

    #[test]
    fn default_cloud_delay() {
        let d = default_cloud_distance();
        // hand computation: 4 + 0.7071067811865476 * 8
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let delay = completion_time(&task(4.0, 4.0, 4.0, 10.0), NodeId(1), &two_nodes(d)).unwrap();
        assert!((delay - 9.656_854_249_492_381).abs() < 1e-12);
    }

    #[test]
    fn feasibility_against_default_cloud() {
        let m = two_nodes(default_cloud_distance());
        assert!(is_feasible(&task(2.0, 2.0, 2.0, 5.0), NodeId(0), &m).unwrap());
        // 2 + 0.70711 · 4 = 4.8284 ≤ 5
        assert!(is_feasible(&task(2.0, 2.0, 2.0, 5.0), NodeId(1), &m).unwrap());
        // 2 + 0.70711 · 8 = 7.6569 > 5
        assert!(!is_feasible(&task(4.0, 4.0, 2.0, 5.0), NodeId(1), &m).unwrap());
        assert!(admits(Mode::QosLess, &task(4.0, 4.0, 2.0, 5.0), NodeId(1), &m).unwrap());
    }

    #[test]
    fn unknown_node() {
        let m = two_nodes(0.1);
        assert!(completion_time(&task(1.0, 1.0, 1.0, 1.0), NodeId(2), &m).is_err());
        assert!(admits(Mode::QosLess, &task(1.0, 1.0, 1.0, 1.0), NodeId(7), &m).is_err());
    }

    #[test]
    fn feasible_targets_ordering() {
        let d = default_cloud_distance();
        let mut b = ScenarioBuilder::new();
        let positions = [[0.0, 0.0], [30.0, 40.0], [100.0, 0.0], [0.0, 10.0]];
        for p in positions {
            b.cloudlet(10.0, 10.0, p);
        }
        let mut rows = vec![vec![0.0; 5]; 5];
        for i in 0..4 {
            for j in 0..4 {
                let (a, c) = (positions[i], positions[j]);
                rows[i][j] = ((a[0] - c[0]).powi(2) + (a[1] - c[1]).powi(2)).sqrt() * 0.001;
            }
            rows[i][4] = d;
            rows[4][i] = d;
        }
        b.distances(rows);
        let s = b.service(1.0, vec![1.0; 4], vec![1.0; 4], 1.0);
        b.task(s, NodeId(0), 4.0, 4.0, 2.0, 5.0);
        b.task(s, NodeId(0), 1.0, 1.0, 2.0, 2.0);
        b.task(s, NodeId(0), 1.0, 1.0, 2.0, 1e9);
        let sc = b.build().unwrap();

        // cloud misses the deadline; cloudlets ordered by distance from node 0
        assert_eq!(
            feasible_targets(&sc.tasks[0], &sc),
            vec![NodeId(0), NodeId(3), NodeId(1), NodeId(2)]
        );
        // boundary: Q = σ keeps only the local node
        assert_eq!(feasible_targets(&sc.tasks[1], &sc), vec![NodeId(0)]);
        assert_eq!(
            feasible_targets(&sc.tasks[2], &sc),
            vec![NodeId(0), NodeId(3), NodeId(1), NodeId(2), NodeId(4)]
        );
    }
}
