//! Seeded scenario generation and the JSON scenario document.
//!
//! Defaults reproduce the reference experiment setup: 400 tasks, 1000
//! services, 4 cloudlets on a 100×100 grid, β = 3 and deadlines of 2.5 × the
//! compute time. Values the setup leaves open (storage demands, cloudlet
//! capacities, the grid-to-time scale) have documented defaults below.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Capacity, DistanceMatrix, Node, NodeId, NodeKind, Scenario, Service, ServiceId, Task, TaskId};
use crate::rng::{Stream, StreamKind};

/// Closed interval `[low, high]`, serialized as a two-element array.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub const fn new(low: f64, high: f64) -> Self {
        Interval { low, high }
    }

    pub fn midpoint(self) -> f64 {
        0.5 * (self.low + self.high)
    }

    pub fn contains(self, v: f64) -> bool {
        self.low <= v && v <= self.high
    }

    fn check(self, name: &str) -> Result<()> {
        if self.low > 0.0 && self.low <= self.high && self.high.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "{name} must satisfy 0 < low <= high, got [{}, {}]",
                self.low, self.high
            )))
        }
    }
}

impl From<[f64; 2]> for Interval {
    fn from([low, high]: [f64; 2]) -> Self {
        Interval { low, high }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.low, i.high]
    }
}

/// Knobs of the generator. Missing keys in a params document take the defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationParams {
    pub num_tasks: usize,
    pub num_services: usize,
    pub num_cloudlets: usize,
    /// Cloudlet scheduling cost is drawn up to `beta` times the cloud's.
    pub beta: f64,
    /// Deadline multiplier: `Q_t = qos_factor · σ(t)`.
    pub qos_factor: f64,
    pub grid_size: f64,
    /// Cloud distance as a multiple of the grid diagonal.
    pub cloud_distance_multiple: f64,
    /// Time units per grid unit per packet-size unit.
    pub distance_scale: f64,
    pub packet_size_range: Interval,
    pub compute_time_range: Interval,
    pub cloud_schedule_cost_range: Interval,
    pub placement_cost_range: Interval,
    pub storage_demand_range: Interval,
    pub cloudlet_storage_range: Interval,
    /// `None` derives `[|T|·μ/(4k), |T|·μ/(2k)]` from the task count, where μ is
    /// the mean compute time and k the number of cloudlets.
    pub cloudlet_compute_range: Option<Interval>,
    /// Draw the packet sizes, compute times and costs from the two endpoints of
    /// their ranges instead of the whole interval.
    pub draw_discrete: bool,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            num_tasks: 400,
            num_services: 1000,
            num_cloudlets: 4,
            beta: 3.0,
            qos_factor: 2.5,
            grid_size: 100.0,
            cloud_distance_multiple: 5.0,
            distance_scale: 0.001,
            packet_size_range: Interval::new(2.0, 4.0),
            compute_time_range: Interval::new(2.0, 4.0),
            cloud_schedule_cost_range: Interval::new(2.0, 4.0),
            placement_cost_range: Interval::new(2.0, 4.0),
            storage_demand_range: Interval::new(1.0, 2.0),
            cloudlet_storage_range: Interval::new(10.0, 20.0),
            cloudlet_compute_range: None,
            draw_discrete: false,
        }
    }
}

impl GenerationParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.num_cloudlets == 0 {
            return bad("num_cloudlets must be at least 1".into());
        }
        if self.num_tasks > 0 && self.num_services == 0 {
            return bad("tasks need at least one service".into());
        }
        if !(self.beta >= 1.0 && self.beta.is_finite()) {
            return bad(format!("beta must be >= 1, got {}", self.beta));
        }
        if !(self.qos_factor >= 1.0 && self.qos_factor.is_finite()) {
            return bad(format!("qos_factor must be >= 1, got {}", self.qos_factor));
        }
        for (name, v) in [
            ("grid_size", self.grid_size),
            ("cloud_distance_multiple", self.cloud_distance_multiple),
            ("distance_scale", self.distance_scale),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        self.packet_size_range.check("packet_size_range")?;
        self.compute_time_range.check("compute_time_range")?;
        self.cloud_schedule_cost_range.check("cloud_schedule_cost_range")?;
        self.placement_cost_range.check("placement_cost_range")?;
        self.storage_demand_range.check("storage_demand_range")?;
        self.cloudlet_storage_range.check("cloudlet_storage_range")?;
        if let Some(r) = self.cloudlet_compute_range {
            r.check("cloudlet_compute_range")?;
        }
        Ok(())
    }

    /// Range for cloudlet compute capacities, explicit or derived from the task count.
    pub fn compute_range(&self) -> Interval {
        self.cloudlet_compute_range.unwrap_or_else(|| {
            let demand = self.num_tasks as f64 * self.compute_time_range.midpoint();
            let k = self.num_cloudlets as f64;
            Interval::new(demand / (4.0 * k), demand / (2.0 * k))
        })
    }

    /// Distance from any cloudlet to the cloud.
    pub fn cloud_distance(&self) -> f64 {
        self.cloud_distance_multiple * self.grid_size * std::f64::consts::SQRT_2 * self.distance_scale
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let params: GenerationParams = serde_json::from_str(text)?;
        params.validate()?;
        Ok(params)
    }
}

fn draw(stream: &mut Stream, range: Interval, discrete: bool) -> f64 {
    if discrete {
        if stream.coin() {
            range.high
        } else {
            range.low
        }
    } else {
        stream.uniform(range.low, range.high)
    }
}

/// Generates a scenario; a pure function of `(params, seed)`.
pub fn generate(params: &GenerationParams, seed: u64) -> Result<Scenario> {
    params.validate()?;
    let k = params.num_cloudlets;
    let cloud = NodeId(k);
    let compute = params.compute_range();
    let discrete = params.draw_discrete;

    let mut nodes = Vec::with_capacity(k + 1);
    for j in 0..k {
        let mut s = Stream::new(seed, StreamKind::Cloudlet, j as u64);
        let x = s.uniform(0.0, params.grid_size);
        let y = s.uniform(0.0, params.grid_size);
        let storage = s.uniform(params.cloudlet_storage_range.low, params.cloudlet_storage_range.high);
        let cpu = s.uniform(compute.low, compute.high);
        nodes.push(Node {
            id: NodeId(j),
            kind: NodeKind::Cloudlet,
            position: Some([x, y]),
            storage_capacity: Capacity::Finite(storage),
            compute_capacity: Capacity::Finite(cpu),
        });
    }
    nodes.push(Node {
        id: cloud,
        kind: NodeKind::Cloud,
        position: None,
        storage_capacity: Capacity::Unbounded,
        compute_capacity: Capacity::Unbounded,
    });

    let mut rows = vec![vec![0.0; k + 1]; k + 1];
    let cloud_d = params.cloud_distance();
    for i in 0..k {
        let a = nodes[i].position.unwrap_or_default();
        for j in (i + 1)..k {
            let b = nodes[j].position.unwrap_or_default();
            let d = (a[0] - b[0]).hypot(a[1] - b[1]) * params.distance_scale;
            rows[i][j] = d;
            rows[j][i] = d;
        }
        rows[i][k] = cloud_d;
        rows[k][i] = cloud_d;
    }

    let mut services = Vec::with_capacity(params.num_services);
    for m in 0..params.num_services {
        let mut s = Stream::new(seed, StreamKind::Service, m as u64);
        let storage_demand = s.uniform(params.storage_demand_range.low, params.storage_demand_range.high);
        let cloud_cost = draw(&mut s, params.cloud_schedule_cost_range, discrete);
        let mut placement_cost = BTreeMap::new();
        let mut schedule_cost = BTreeMap::new();
        for j in 0..k {
            placement_cost.insert(NodeId(j), draw(&mut s, params.placement_cost_range, discrete));
            let edge = params.beta * cloud_cost;
            let c = if discrete {
                if s.coin() {
                    edge
                } else {
                    cloud_cost
                }
            } else {
                s.uniform(cloud_cost, edge)
            };
            schedule_cost.insert(NodeId(j), c);
        }
        schedule_cost.insert(cloud, cloud_cost);
        services.push(Service { id: ServiceId(m), storage_demand, placement_cost, schedule_cost });
    }

    let mut tasks = Vec::with_capacity(params.num_tasks);
    for t in 0..params.num_tasks {
        let mut s = Stream::new(seed, StreamKind::Task, t as u64);
        let service = ServiceId(s.index(params.num_services));
        let local_node = NodeId(s.index(k));
        let input_size = draw(&mut s, params.packet_size_range, discrete);
        let output_size = draw(&mut s, params.packet_size_range, discrete);
        let compute_time = draw(&mut s, params.compute_time_range, discrete);
        tasks.push(Task {
            id: TaskId(t),
            service,
            local_node,
            input_size,
            output_size,
            compute_time,
            qos_deadline: params.qos_factor * compute_time,
        });
    }

    let scenario = Scenario {
        seed,
        params: params.clone(),
        nodes,
        services,
        tasks,
        distances: DistanceMatrix::from_rows(rows),
    };
    debug_assert!(scenario.check().is_ok());
    Ok(scenario)
}

/// Serializes a scenario as a pretty-printed JSON document.
pub fn save(scenario: &Scenario) -> Result<String> {
    Ok(serde_json::to_string_pretty(scenario)?)
}

/// Parses and checks a scenario document.
pub fn load(document: &str) -> Result<Scenario> {
    let scenario: Scenario = serde_json::from_str(document)?;
    scenario.check()?;
    Ok(scenario)
}

pub fn save_file(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, save(scenario)?)?;
    Ok(())
}

pub fn load_file(path: impl AsRef<Path>) -> Result<Scenario> {
    load(&std::fs::read_to_string(path)?)
}
