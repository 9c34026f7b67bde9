//! Joint service placement and deadline-constrained task scheduling on a
//! three-tier edge-to-cloud platform.
//!
//! * [`model`]: scenarios, assignments, objective evaluation and constraint checks.
//! * [`timing`]: the completion-time model and deadline feasibility.
//! * [`scenario`]: seeded instance generation and the JSON scenario document.
//! * [`exact`]: branch-and-bound solver, brute-force oracle and MILP export.
//! * [`heuristics`]: Local Serving and Global Serving.
//! * [`experiment`]: Monte-Carlo parameter sweeps, summaries, CSV and SVG output.

pub mod error;
pub mod exact;
pub mod experiment;
pub mod heuristics;
pub mod model;
pub mod rng;
pub mod scenario;
pub mod timing;

pub use error::{Error, Result};
pub use model::{
    evaluate_objective, induced_placements, validate, Assignment, Capacity, Constraint, CostReport, DistanceMatrix,
    Mode, Node, NodeId, NodeKind, Scenario, ScenarioBuilder, Service, ServiceId, Task, TaskId, Violation,
};
pub use scenario::{generate, GenerationParams, Interval};
pub use exact::{brute_force, solve, SolveOptions, SolveOutcome, SolveStatus};
pub use heuristics::{global_serving, local_serving};
