//! Problem instances, solutions and their evaluation.
//!
//! A [`Scenario`] describes the platform (cloudlets plus exactly one cloud), the
//! service catalogue and the user tasks. An [`Assignment`] is a candidate
//! solution: which services are installed on which cloudlets and where every
//! task runs. [`evaluate_objective`] prices an assignment and [`validate`]
//! lists every violated constraint instance.
//!
//! Constraint numbering follows the ILP formulation:
//!
//! | # | meaning |
//! |---|---------|
//! | 1 | storage: `Σ_m H_m X_mj ≤ S_j` per cloudlet |
//! | 2 | compute: `Σ_t σ(t) Y_tj ≤ W_j` per cloudlet |
//! | 3 | every task scheduled exactly once |
//! | 4 | deadline: `δ(t, j) ≤ Q_t` for the chosen node |
//! | 7 | a task may only run on a cloudlet hosting its service |
//!
//! The cloud hosts every service implicitly at zero placement cost and has
//! unbounded capacities, so it never appears in the placement set and never
//! violates constraints 1, 2 or 7.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scenario::GenerationParams;
use crate::timing;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident, $label:literal) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub usize);

        impl $name {
            pub const KIND: &'static str = $label;

            pub fn index(self) -> usize {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// Index of a node (cloudlet or cloud). Node ids are `0..nodes.len()`.
    NodeId,
    "node"
);
id_type!(
    /// Index into the service catalogue.
    ServiceId,
    "service"
);
id_type!(
    /// Index of a user task.
    TaskId,
    "task"
);

/// Storage or compute capacity of a node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Capacity {
    Finite(f64),
    Unbounded,
}

impl Capacity {
    pub fn is_unbounded(self) -> bool {
        matches!(self, Capacity::Unbounded)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Capacity::Finite(v) => Some(v),
            Capacity::Unbounded => None,
        }
    }

    /// Whether `amount` fits, with no tolerance.
    pub fn admits(self, amount: f64) -> bool {
        match self {
            Capacity::Finite(v) => amount <= v,
            Capacity::Unbounded => true,
        }
    }

    /// Capacity left after consuming `amount`. Unbounded stays unbounded.
    pub fn minus(self, amount: f64) -> Capacity {
        match self {
            Capacity::Finite(v) => Capacity::Finite(v - amount),
            Capacity::Unbounded => Capacity::Unbounded,
        }
    }
}

impl Serialize for Capacity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Capacity::Finite(v) => serializer.serialize_f64(*v),
            Capacity::Unbounded => serializer.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(v) => Ok(Capacity::Finite(v)),
            Repr::Text(s) if s == "unbounded" => Ok(Capacity::Unbounded),
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "capacity must be a number or \"unbounded\", got {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Cloudlet,
    Cloud,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Grid position; cloudlets only.
    pub position: Option<[f64; 2]>,
    pub storage_capacity: Capacity,
    pub compute_capacity: Capacity,
}

impl Node {
    pub fn is_cloud(&self) -> bool {
        self.kind == NodeKind::Cloud
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Service {
    pub id: ServiceId,
    /// Storage units consumed on a cloudlet hosting this service (`H_m`).
    pub storage_demand: f64,
    /// One-off cost of installing the service on a cloudlet (`P^p_mj`). No cloud entry.
    pub placement_cost: BTreeMap<NodeId, f64>,
    /// Per-task cost of running a request for this service on a node (`P^s_mj`), cloud included.
    pub schedule_cost: BTreeMap<NodeId, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub service: ServiceId,
    /// Cloudlet the user is attached to (`J(t)`).
    pub local_node: NodeId,
    pub input_size: f64,
    pub output_size: f64,
    /// `σ(t)`
    pub compute_time: f64,
    /// `Q_t`
    pub qos_deadline: f64,
}

/// Symmetric per-packet-unit transfer times between nodes, stored as full rows in node-id order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DistanceMatrix {
    rows: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        DistanceMatrix { rows }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, a: NodeId, b: NodeId) -> Result<f64> {
        self.rows
            .get(a.0)
            .ok_or(Error::UnknownId { kind: NodeId::KIND, id: a.0 })?
            .get(b.0)
            .copied()
            .ok_or(Error::UnknownId { kind: NodeId::KIND, id: b.0 })
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.rows.len() != n {
            return Err(Error::InvalidScenario(format!(
                "distance matrix has {} rows for {n} nodes",
                self.rows.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidScenario(format!(
                    "distance matrix row {i} has {} entries for {n} nodes",
                    row.len()
                )));
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidScenario(format!(
                    "distance matrix diagonal entry ({i},{i}) is {}, expected 0",
                    row[i]
                )));
            }
            for (j, &d) in row.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidScenario(format!(
                        "distance ({i},{j}) = {d} is not a nonnegative finite number"
                    )));
                }
                if d != self.rows[j][i] {
                    return Err(Error::InvalidScenario(format!(
                        "asymmetric distance matrix: ({i},{j}) = {d} but ({j},{i}) = {}",
                        self.rows[j][i]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A complete problem instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub seed: u64,
    pub params: GenerationParams,
    pub nodes: Vec<Node>,
    pub services: Vec<Service>,
    pub tasks: Vec<Task>,
    pub distances: DistanceMatrix,
}

impl Scenario {
    /// Checks every structural invariant: contiguous ids, exactly one cloud,
    /// total cost maps, a valid distance matrix and well-formed tasks.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));

        for (i, node) in self.nodes.iter().enumerate() {
            if node.id.0 != i {
                return bad(format!("node at position {i} has id {}", node.id));
            }
            match node.kind {
                NodeKind::Cloud => {
                    if !node.storage_capacity.is_unbounded() || !node.compute_capacity.is_unbounded() {
                        return bad(format!("cloud node {i} must have unbounded capacities"));
                    }
                }
                NodeKind::Cloudlet => {
                    for (what, cap) in [("storage", node.storage_capacity), ("compute", node.compute_capacity)] {
                        match cap.finite() {
                            Some(v) if v.is_finite() && v >= 0.0 => {}
                            _ => return bad(format!("cloudlet {i} needs a finite nonnegative {what} capacity")),
                        }
                    }
                    if node.position.is_none() {
                        return bad(format!("cloudlet {i} has no position"));
                    }
                }
            }
        }
        let clouds = self.nodes.iter().filter(|n| n.is_cloud()).count();
        if clouds != 1 {
            return bad(format!("expected exactly one cloud node, found {clouds}"));
        }
        self.distances.check(self.nodes.len())?;

        let cost_ok = |v: f64| v.is_finite() && v >= 0.0;
        for (i, service) in self.services.iter().enumerate() {
            if service.id.0 != i {
                return bad(format!("service at position {i} has id {}", service.id));
            }
            if !cost_ok(service.storage_demand) {
                return bad(format!("service {i} has invalid storage demand {}", service.storage_demand));
            }
            for node in &self.nodes {
                match service.schedule_cost.get(&node.id) {
                    Some(&c) if cost_ok(c) => {}
                    Some(&c) => return bad(format!("service {i} schedule cost on node {} is {c}", node.id)),
                    None => return bad(format!("service {i} has no schedule cost for node {}", node.id)),
                }
                match (node.kind, service.placement_cost.get(&node.id)) {
                    (NodeKind::Cloudlet, Some(&c)) if cost_ok(c) => {}
                    (NodeKind::Cloudlet, Some(&c)) => {
                        return bad(format!("service {i} placement cost on node {} is {c}", node.id))
                    }
                    (NodeKind::Cloudlet, None) => {
                        return bad(format!("service {i} has no placement cost for cloudlet {}", node.id))
                    }
                    (NodeKind::Cloud, Some(_)) => {
                        return bad(format!("service {i} must not carry a placement cost for the cloud"))
                    }
                    (NodeKind::Cloud, None) => {}
                }
            }
            if service.schedule_cost.len() != self.nodes.len() {
                return bad(format!("service {i} has schedule costs for unknown nodes"));
            }
            if service.placement_cost.len() != self.nodes.len() - 1 {
                return bad(format!("service {i} has placement costs for unknown nodes"));
            }
        }

        for (i, task) in self.tasks.iter().enumerate() {
            if task.id.0 != i {
                return bad(format!("task at position {i} has id {}", task.id));
            }
            if task.service.0 >= self.services.len() {
                return bad(format!("task {i} references unknown service {}", task.service));
            }
            match self.nodes.get(task.local_node.0) {
                Some(n) if !n.is_cloud() => {}
                _ => return bad(format!("task {i} local node {} is not a cloudlet", task.local_node)),
            }
            let positive = |v: f64| v.is_finite() && v > 0.0;
            if !positive(task.input_size) || !positive(task.output_size) || !positive(task.compute_time) {
                return bad(format!("task {i} needs positive packet sizes and compute time"));
            }
            if !(task.qos_deadline >= task.compute_time) {
                return bad(format!(
                    "task {i} deadline {} is below its compute time {}",
                    task.qos_deadline, task.compute_time
                ));
            }
        }
        Ok(())
    }

    /// Id of the cloud node. Panics on a scenario that failed [`Scenario::check`].
    pub fn cloud(&self) -> NodeId {
        self.nodes
            .iter()
            .find(|n| n.is_cloud())
            .map(|n| n.id)
            .expect("scenario has no cloud node")
    }

    pub fn cloudlets(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| !n.is_cloud())
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.0).ok_or(Error::UnknownId { kind: NodeId::KIND, id: id.0 })
    }

    pub fn service(&self, id: ServiceId) -> Result<&Service> {
        self.services.get(id.0).ok_or(Error::UnknownId { kind: ServiceId::KIND, id: id.0 })
    }

    pub fn task(&self, id: TaskId) -> Result<&Task> {
        self.tasks.get(id.0).ok_or(Error::UnknownId { kind: TaskId::KIND, id: id.0 })
    }

    /// Cost of running `task` on `node`.
    pub fn schedule_cost(&self, task: &Task, node: NodeId) -> Result<f64> {
        self.service(task.service)?
            .schedule_cost
            .get(&node)
            .copied()
            .ok_or(Error::UnknownId { kind: NodeId::KIND, id: node.0 })
    }

    /// Services requested by at least one task, ascending.
    pub fn requested_services(&self) -> BTreeSet<ServiceId> {
        self.tasks.iter().map(|t| t.service).collect()
    }
}

/// Whether the deadline constraint (4) is part of the problem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    QosAware,
    QosLess,
}

impl Mode {
    pub fn enforces(self, constraint: Constraint) -> bool {
        !(self == Mode::QosLess && constraint == Constraint::Deadline)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::QosAware => "qos_aware",
            Mode::QosLess => "qos_less",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "qos_aware" => Ok(Mode::QosAware),
            "qos_less" => Ok(Mode::QosLess),
            other => Err(format!("unknown mode {other:?} (expected qos_aware or qos_less)")),
        }
    }
}

/// A candidate solution.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// `(service, cloudlet)` pairs with `X_mj = 1`. Cloud placements are implicit.
    pub placements: BTreeSet<(ServiceId, NodeId)>,
    /// `Y_tj = 1` entries.
    pub schedules: BTreeMap<TaskId, NodeId>,
    /// Tasks no node could take.
    pub unserved: BTreeSet<TaskId>,
}

impl Assignment {
    /// Builds an assignment whose placements are exactly those the schedules require.
    pub fn from_schedules(scenario: &Scenario, schedules: BTreeMap<TaskId, NodeId>) -> Result<Self> {
        let placements = induced_placements(scenario, &schedules)?;
        Ok(Assignment { placements, schedules, unserved: BTreeSet::new() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Constraint {
    Storage,
    Compute,
    Assignment,
    Deadline,
    Placement,
}

impl Constraint {
    pub fn number(self) -> u8 {
        match self {
            Constraint::Storage => 1,
            Constraint::Compute => 2,
            Constraint::Assignment => 3,
            Constraint::Deadline => 4,
            Constraint::Placement => 7,
        }
    }
}

impl From<Constraint> for u8 {
    fn from(c: Constraint) -> u8 {
        c.number()
    }
}

impl TryFrom<u8> for Constraint {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, Self::Error> {
        match v {
            1 => Ok(Constraint::Storage),
            2 => Ok(Constraint::Compute),
            3 => Ok(Constraint::Assignment),
            4 => Ok(Constraint::Deadline),
            7 => Ok(Constraint::Placement),
            other => Err(format!("no constraint numbered {other}")),
        }
    }
}

/// One violated constraint instance. `amount` is the excess over the bound
/// (storage/compute/time units), or the number of missing/extra schedules for
/// constraint 3, or 1 for a missing placement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub node: Option<NodeId>,
    pub task: Option<TaskId>,
    pub service: Option<ServiceId>,
    pub amount: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "constraint {}", self.constraint.number())?;
        if let Some(n) = self.node {
            write!(f, " node {n}")?;
        }
        if let Some(t) = self.task {
            write!(f, " task {t}")?;
        }
        if let Some(s) = self.service {
            write!(f, " service {s}")?;
        }
        write!(f, " excess {}", self.amount)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub placement_cost: f64,
    pub scheduling_cost: f64,
    pub total: f64,
    pub per_task_delay: BTreeMap<TaskId, f64>,
    pub violations: Vec<Violation>,
    /// Tasks not scheduled plus scheduled tasks that miss their deadline.
    pub drop_count: usize,
    pub drop_fraction: f64,
}

fn check_references(scenario: &Scenario, assignment: &Assignment) -> Result<()> {
    for &(s, j) in &assignment.placements {
        scenario.service(s)?;
        if scenario.node(j)?.is_cloud() {
            return Err(Error::InvalidAssignment(format!(
                "service {s} is placed on the cloud, which hosts every service implicitly"
            )));
        }
    }
    for (&t, &j) in &assignment.schedules {
        scenario.task(t)?;
        scenario.node(j)?;
    }
    for &t in &assignment.unserved {
        scenario.task(t)?;
    }
    Ok(())
}

/// Prices an assignment and collects its per-task delays, violations and drop statistics.
pub fn evaluate_objective(scenario: &Scenario, assignment: &Assignment) -> Result<CostReport> {
    check_references(scenario, assignment)?;

    let mut placement_cost = 0.0;
    for &(s, j) in &assignment.placements {
        placement_cost += scenario.services[s.0].placement_cost[&j];
    }

    let mut scheduling_cost = 0.0;
    let mut per_task_delay = BTreeMap::new();
    let mut late = 0;
    for (&t, &j) in &assignment.schedules {
        let task = &scenario.tasks[t.0];
        scheduling_cost += scenario.schedule_cost(task, j)?;
        let delay = timing::completion_time(task, j, &scenario.distances)?;
        if delay > task.qos_deadline {
            late += 1;
        }
        per_task_delay.insert(t, delay);
    }

    let unscheduled = scenario.tasks.len() - assignment.schedules.len();
    let drop_count = unscheduled + late;
    let drop_fraction = if scenario.tasks.is_empty() {
        0.0
    } else {
        drop_count as f64 / scenario.tasks.len() as f64
    };

    Ok(CostReport {
        placement_cost,
        scheduling_cost,
        total: placement_cost + scheduling_cost,
        per_task_delay,
        violations: validate(scenario, assignment),
        drop_count,
        drop_fraction,
    })
}

fn exceeds(used: f64, capacity: Capacity) -> Option<f64> {
    let cap = capacity.finite()?;
    // Sums are taken in id order here but in search order by the solvers.
    let slack = 1e-9 * cap.abs().max(1.0);
    (used > cap + slack).then_some(used - cap)
}

/// Lists every violated constraint instance (1, 2, 3, 4 and 7).
///
/// Dangling ids are reported as constraint-3 records for unknown tasks and
/// ignored otherwise; use [`evaluate_objective`] to reject them outright.
pub fn validate(scenario: &Scenario, assignment: &Assignment) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = scenario.nodes.len();

    let mut storage = vec![0.0; n];
    for &(s, j) in &assignment.placements {
        if let (Some(service), true) = (scenario.services.get(s.0), j.0 < n) {
            storage[j.0] += service.storage_demand;
        }
    }
    let mut compute = vec![0.0; n];
    for (&t, &j) in &assignment.schedules {
        if let (Some(task), true) = (scenario.tasks.get(t.0), j.0 < n) {
            compute[j.0] += task.compute_time;
        }
    }
    for node in &scenario.nodes {
        if let Some(amount) = exceeds(storage[node.id.0], node.storage_capacity) {
            out.push(Violation { constraint: Constraint::Storage, node: Some(node.id), task: None, service: None, amount });
        }
    }
    for node in &scenario.nodes {
        if let Some(amount) = exceeds(compute[node.id.0], node.compute_capacity) {
            out.push(Violation { constraint: Constraint::Compute, node: Some(node.id), task: None, service: None, amount });
        }
    }

    for task in &scenario.tasks {
        let times = assignment.schedules.contains_key(&task.id) as usize;
        if times != 1 || assignment.unserved.contains(&task.id) {
            let amount = if times == 1 { 1.0 } else { (1.0 - times as f64).abs() };
            out.push(Violation {
                constraint: Constraint::Assignment,
                node: None,
                task: Some(task.id),
                service: Some(task.service),
                amount,
            });
        }
    }

    for (&t, &j) in &assignment.schedules {
        let Some(task) = scenario.tasks.get(t.0) else { continue };
        if let Ok(delay) = timing::completion_time(task, j, &scenario.distances) {
            if delay > task.qos_deadline {
                out.push(Violation {
                    constraint: Constraint::Deadline,
                    node: Some(j),
                    task: Some(t),
                    service: Some(task.service),
                    amount: delay - task.qos_deadline,
                });
            }
        }
    }

    for (&t, &j) in &assignment.schedules {
        let Some(task) = scenario.tasks.get(t.0) else { continue };
        let on_cloudlet = scenario.nodes.get(j.0).is_some_and(|n| !n.is_cloud());
        if on_cloudlet && !assignment.placements.contains(&(task.service, j)) {
            out.push(Violation {
                constraint: Constraint::Placement,
                node: Some(j),
                task: Some(t),
                service: Some(task.service),
                amount: 1.0,
            });
        }
    }
    out
}

/// The minimal placement set making constraint 7 hold for `schedules`.
pub fn induced_placements(
    scenario: &Scenario,
    schedules: &BTreeMap<TaskId, NodeId>,
) -> Result<BTreeSet<(ServiceId, NodeId)>> {
    let mut out = BTreeSet::new();
    for (&t, &j) in schedules {
        let task = scenario.task(t)?;
        if !scenario.node(j)?.is_cloud() {
            out.insert((task.service, j));
        }
    }
    Ok(out)
}

/// Builder for hand-made scenarios. Nodes are added cloudlets first; the cloud
/// is appended by [`ScenarioBuilder::build`].
#[derive(Debug, Default)]
pub struct ScenarioBuilder {
    cloudlets: Vec<(f64, f64, [f64; 2])>,
    cloud_distance: f64,
    services: Vec<(f64, Vec<f64>, Vec<f64>, f64)>,
    tasks: Vec<Task>,
    distances: Option<Vec<Vec<f64>>>,
    seed: u64,
}

impl ScenarioBuilder {
    pub fn new() -> Self {
        ScenarioBuilder { cloud_distance: 1.0, ..Default::default() }
    }

    /// Adds a cloudlet with the given storage and compute capacity; returns its id.
    pub fn cloudlet(&mut self, storage: f64, compute: f64, position: [f64; 2]) -> NodeId {
        self.cloudlets.push((storage, compute, position));
        NodeId(self.cloudlets.len() - 1)
    }

    /// Distance from every cloudlet to the cloud.
    pub fn cloud_distance(&mut self, d: f64) -> &mut Self {
        self.cloud_distance = d;
        self
    }

    /// Full distance matrix over cloudlets then cloud, overriding positions.
    pub fn distances(&mut self, rows: Vec<Vec<f64>>) -> &mut Self {
        self.distances = Some(rows);
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = seed;
        self
    }

    /// Adds a service. `placement` and `cloudlet_schedule` are indexed by cloudlet.
    pub fn service(
        &mut self,
        storage_demand: f64,
        placement: Vec<f64>,
        cloudlet_schedule: Vec<f64>,
        cloud_schedule: f64,
    ) -> ServiceId {
        self.services.push((storage_demand, placement, cloudlet_schedule, cloud_schedule));
        ServiceId(self.services.len() - 1)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn task(
        &mut self,
        service: ServiceId,
        local: NodeId,
        input_size: f64,
        output_size: f64,
        compute_time: f64,
        qos_deadline: f64,
    ) -> TaskId {
        let id = TaskId(self.tasks.len());
        self.tasks.push(Task { id, service, local_node: local, input_size, output_size, compute_time, qos_deadline });
        id
    }

    pub fn build(&self) -> Result<Scenario> {
        let k = self.cloudlets.len();
        let cloud = NodeId(k);
        let mut nodes: Vec<Node> = self
            .cloudlets
            .iter()
            .enumerate()
            .map(|(i, &(s, w, p))| Node {
                id: NodeId(i),
                kind: NodeKind::Cloudlet,
                position: Some(p),
                storage_capacity: Capacity::Finite(s),
                compute_capacity: Capacity::Finite(w),
            })
            .collect();
        nodes.push(Node {
            id: cloud,
            kind: NodeKind::Cloud,
            position: None,
            storage_capacity: Capacity::Unbounded,
            compute_capacity: Capacity::Unbounded,
        });

        let rows = match &self.distances {
            Some(rows) => rows.clone(),
            None => {
                let mut rows = vec![vec![0.0; k + 1]; k + 1];
                for i in 0..k {
                    for j in 0..k {
                        let (a, b) = (self.cloudlets[i].2, self.cloudlets[j].2);
                        rows[i][j] = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                    }
                    rows[i][k] = self.cloud_distance;
                    rows[k][i] = self.cloud_distance;
                }
                rows
            }
        };

        let mut services = Vec::with_capacity(self.services.len());
        for (m, (h, placement, sched, cloud_cost)) in self.services.iter().enumerate() {
            if placement.len() != k || sched.len() != k {
                return Err(Error::InvalidScenario(format!(
                    "service {m} needs one placement and one schedule cost per cloudlet"
                )));
            }
            let placement_cost = (0..k).map(|j| (NodeId(j), placement[j])).collect();
            let mut schedule_cost: BTreeMap<_, _> = (0..k).map(|j| (NodeId(j), sched[j])).collect();
            schedule_cost.insert(cloud, *cloud_cost);
            services.push(Service { id: ServiceId(m), storage_demand: *h, placement_cost, schedule_cost });
        }

        let scenario = Scenario {
            seed: self.seed,
            params: GenerationParams::default(),
            nodes,
            services,
            tasks: self.tasks.clone(),
            distances: DistanceMatrix::from_rows(rows),
        };
        scenario.check()?;
        Ok(scenario)
    }
}
