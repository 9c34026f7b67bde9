//! Monte-Carlo parameter sweeps.
//!
//! A sweep varies one generator parameter over a grid of values. For every
//! `(value, replication)` pair one scenario is generated and every requested
//! algorithm runs on that same scenario, so rows are paired by construction.
//!
//! Row seeds come from [`row_seed`], a SplitMix64 chain over
//! `(seed_base, value_index, replication)`. Appending values or replications
//! leaves the scenarios of existing rows unchanged.

mod output;
mod presets;
mod summary;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Backend, SolveOptions, SolveStatus};
use crate::heuristics;
use crate::model::{evaluate_objective, Mode, Scenario};
use crate::rng::splitmix64;
use crate::scenario::{generate, GenerationParams};

pub use output::{parse_csv, render_svg, write_csv, write_summary_csv, Metric, CSV_HEADER};
pub use presets::{desk_scale, preset, DeskScale, PRESETS};
pub use summary::{summarize, summarize_paired, SummaryRow};

pub const DEFAULT_REPLICATIONS: usize = 20;
pub const DEFAULT_EXACT_NODE_LIMIT: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParam {
    NumTasks,
    QosFactor,
    Beta,
}

impl SweptParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweptParam::NumTasks => "num_tasks",
            SweptParam::QosFactor => "qos_factor",
            SweptParam::Beta => "beta",
        }
    }

    /// `base` with this parameter set to `value`.
    pub fn apply(self, base: &GenerationParams, value: f64) -> Result<GenerationParams> {
        let mut params = base.clone();
        match self {
            SweptParam::NumTasks => {
                if !(value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(Error::InvalidSweep(format!("num_tasks must be a whole number, got {value}")));
                }
                params.num_tasks = value as usize;
            }
            SweptParam::QosFactor => params.qos_factor = value,
            SweptParam::Beta => params.beta = value,
        }
        params.validate()?;
        Ok(params)
    }
}

impl fmt::Display for SweptParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Exact,
    ExactQosLess,
    Local,
    Global,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Exact, Algorithm::ExactQosLess, Algorithm::Local, Algorithm::Global];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::ExactQosLess => "exact_qos_less",
            Algorithm::Local => "local",
            Algorithm::Global => "global",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Algorithm::Exact | Algorithm::ExactQosLess)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown algorithm {s:?}")))
    }
}

/// Outcome class of one row.
///
/// Plain means take `optimal`, `feasible` and `partial` rows; paired means only
/// take complete solutions (`optimal` or `feasible`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Optimal,
    Infeasible,
    LimitReached,
    /// A heuristic served every task.
    Feasible,
    /// A heuristic left some tasks unserved.
    Partial,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Optimal => "optimal",
            RowStatus::Infeasible => "infeasible",
            RowStatus::LimitReached => "limit_reached",
            RowStatus::Feasible => "feasible",
            RowStatus::Partial => "partial",
        }
    }

    /// The row carries an assignment whose cost and drop fraction count.
    pub fn is_included(self) -> bool {
        matches!(self, RowStatus::Optimal | RowStatus::Feasible | RowStatus::Partial)
    }

    /// The row carries an assignment that serves every task.
    pub fn is_complete(self) -> bool {
        matches!(self, RowStatus::Optimal | RowStatus::Feasible)
    }
}

impl From<SolveStatus> for RowStatus {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Optimal => RowStatus::Optimal,
            SolveStatus::Infeasible => RowStatus::Infeasible,
            SolveStatus::LimitReached => RowStatus::LimitReached,
        }
    }
}

fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

fn default_node_limit() -> Option<u64> {
    Some(DEFAULT_EXACT_NODE_LIMIT)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub swept: SweptParam,
    pub values: Vec<f64>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub base: GenerationParams,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub seed_base: u64,
    /// Branch-and-bound node budget per exact solve.
    #[serde(default = "default_node_limit")]
    pub exact_node_limit: Option<u64>,
    /// Wall-clock budget per exact solve. Makes statuses timing dependent.
    #[serde(default)]
    pub exact_time_limit_ms: Option<u64>,
}

impl SweepSpec {
    pub fn new(swept: SweptParam, values: Vec<f64>, base: GenerationParams, algorithms: Vec<Algorithm>) -> Self {
        SweepSpec {
            swept,
            values,
            replications: DEFAULT_REPLICATIONS,
            base,
            algorithms,
            seed_base: 0,
            exact_node_limit: default_node_limit(),
            exact_time_limit_ms: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSweep(msg.into()));
        if self.values.is_empty() {
            return bad("values must not be empty");
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) || self.values.iter().any(|v| !v.is_finite()) {
            return bad("values must be finite and strictly increasing");
        }
        if self.replications == 0 {
            return bad("replications must be at least 1");
        }
        if self.algorithms.is_empty() {
            return bad("algorithms must not be empty");
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            return bad("algorithms must not repeat");
        }
        for &v in &self.values {
            self.swept.apply(&self.base, v)?;
        }
        Ok(())
    }

    /// Number of rows a run produces.
    pub fn row_count(&self) -> usize {
        self.values.len() * self.replications * self.algorithms.len()
    }

    fn solve_options(&self, mode: Mode, backend: &Backend) -> SolveOptions {
        SolveOptions {
            mode,
            node_limit: self.exact_node_limit,
            time_limit: self.exact_time_limit_ms.map(std::time::Duration::from_millis),
            backend: backend.clone(),
            ..Default::default()
        }
    }
}

/// Execution settings that do not affect row contents (apart from `runtime_ms`).
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses rayon's default.
    pub workers: Option<usize>,
    pub backend: Backend,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub swept_param: SweptParam,
    pub swept_value: f64,
    pub replication: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub status: RowStatus,
    pub objective_total: Option<f64>,
    pub placement_cost: Option<f64>,
    pub scheduling_cost: Option<f64>,
    pub drop_fraction: Option<f64>,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Scenario seed of replication `replication` at value index `value_index`:
/// `splitmix64(splitmix64(seed_base, value_index + 1), replication + 1)`.
pub fn row_seed(seed_base: u64, value_index: usize, replication: usize) -> u64 {
    splitmix64(splitmix64(seed_base, value_index as u64 + 1), replication as u64 + 1)
}

/// The scenario every algorithm sees at `(value_index, replication)`.
pub fn sweep_scenario(spec: &SweepSpec, value_index: usize, replication: usize) -> Result<Scenario> {
    let value = *spec
        .values
        .get(value_index)
        .ok_or_else(|| Error::InvalidSweep(format!("value index {value_index} out of range")))?;
    let params = spec.swept.apply(&spec.base, value)?;
    generate(&params, row_seed(spec.seed_base, value_index, replication))
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with(spec, &RunOptions::default())
}

/// Runs every `(value, replication, algorithm)` cell. Rows come back ordered by
/// value index, replication and the order of `spec.algorithms`, whatever the
/// worker count.
pub fn run_sweep_with(spec: &SweepSpec, options: &RunOptions) -> Result<SweepResult> {
    spec.validate()?;
    let builtin = matches!(options.backend, Backend::Builtin);
    let unlimited = spec.exact_node_limit.is_none() && spec.exact_time_limit_ms.is_none();
    if builtin && unlimited && spec.algorithms.iter().any(|a| a.is_exact()) {
        return Err(Error::InvalidSweep(
            "exact algorithms need a node or time limit unless an external backend is configured".into(),
        ));
    }

    let cells: Vec<(usize, usize)> =
        (0..spec.values.len()).flat_map(|v| (0..spec.replications).map(move |r| (v, r))).collect();
    let work = || -> Result<Vec<Vec<SweepRow>>> {
        cells.par_iter().map(|&(v, r)| run_cell(spec, options, v, r)).collect()
    };
    let groups = match options.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidSweep(format!("worker pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    Ok(SweepResult { rows: groups.into_iter().flatten().collect() })
}

fn run_cell(spec: &SweepSpec, options: &RunOptions, value_index: usize, replication: usize) -> Result<Vec<SweepRow>> {
    let scenario = sweep_scenario(spec, value_index, replication)?;
    let mut rows = Vec::with_capacity(spec.algorithms.len());
    for &algorithm in &spec.algorithms {
        let start = Instant::now();
        let (status, report) = match algorithm {
            Algorithm::Exact | Algorithm::ExactQosLess => {
                let mode = if algorithm == Algorithm::Exact { Mode::QosAware } else { Mode::QosLess };
                let out = exact::solve(&scenario, &spec.solve_options(mode, &options.backend))?;
                (RowStatus::from(out.status), out.report)
            }
            Algorithm::Local | Algorithm::Global => {
                let assignment = if algorithm == Algorithm::Local {
                    heuristics::local_serving(&scenario)
                } else {
                    heuristics::global_serving(&scenario)
                };
                let status = if assignment.unserved.is_empty() { RowStatus::Feasible } else { RowStatus::Partial };
                (status, Some(evaluate_objective(&scenario, &assignment)?))
            }
        };
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        rows.push(SweepRow {
            swept_param: spec.swept,
            swept_value: spec.values[value_index],
            replication,
            seed: scenario.seed,
            algorithm,
            status,
            objective_total: report.as_ref().map(|r| r.total),
            placement_cost: report.as_ref().map(|r| r.placement_cost),
            scheduling_cost: report.as_ref().map(|r| r.scheduling_cost),
            drop_fraction: report.as_ref().map(|r| r.drop_fraction),
            runtime_ms,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(algorithms: Vec<Algorithm>) -> SweepSpec {
        let base = GenerationParams { num_tasks: 12, num_services: 6, ..Default::default() };
        let mut spec = SweepSpec::new(SweptParam::NumTasks, vec![8.0, 12.0], base, algorithms);
        spec.replications = 3;
        spec
    }

    #[test]
    fn row_layout_and_order() {
        let spec = small(vec![Algorithm::Exact, Algorithm::Local, Algorithm::Global]);
        let result = run_sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 2 * 3 * 3);
        let keys: Vec<_> = result.rows.iter().map(|r| (r.swept_value as usize, r.replication, r.algorithm)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        for chunk in result.rows.chunks(3) {
            assert!(chunk.iter().all(|r| r.seed == chunk[0].seed));
        }
    }

    #[test]
    fn single_local_row_matches_direct_call() {
        let mut spec = small(vec![Algorithm::Local]);
        spec.values = vec![10.0];
        spec.replications = 1;
        let result = run_sweep(&spec).unwrap();
        assert_eq!(result.rows.len(), 1);
        let scenario = sweep_scenario(&spec, 0, 0).unwrap();
        let report = evaluate_objective(&scenario, &heuristics::local_serving(&scenario)).unwrap();
        let row = &result.rows[0];
        assert_eq!(row.objective_total, Some(report.total));
        assert_eq!(row.drop_fraction, Some(report.drop_fraction));
    }

    #[test]
    fn seeds_survive_grid_extension() {
        let spec = small(vec![Algorithm::Global]);
        let mut longer = spec.clone();
        longer.values.push(16.0);
        longer.replications = 5;
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&longer).unwrap();
        for row in &a.rows {
            let twin = b
                .rows
                .iter()
                .find(|r| r.swept_value == row.swept_value && r.replication == row.replication)
                .unwrap();
            assert_eq!(twin.seed, row.seed);
            assert_eq!(twin.objective_total, row.objective_total);
        }
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let spec = small(vec![Algorithm::Exact, Algorithm::Global]);
        let strip = |mut r: SweepResult| {
            r.rows.iter_mut().for_each(|row| row.runtime_ms = 0.0);
            r
        };
        let one = strip(run_sweep_with(&spec, &RunOptions { workers: Some(1), ..Default::default() }).unwrap());
        let four = strip(run_sweep_with(&spec, &RunOptions { workers: Some(4), ..Default::default() }).unwrap());
        assert_eq!(one, four);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = small(vec![Algorithm::Local]);
        spec.values = vec![];
        assert!(spec.validate().is_err());
        spec.values = vec![2.0, 2.0];
        assert!(spec.validate().is_err());
        spec.values = vec![2.5];
        assert!(spec.validate().is_err(), "fractional task count");
        spec.values = vec![2.0];
        spec.replications = 0;
        assert!(spec.validate().is_err());

        let mut spec = small(vec![Algorithm::Exact]);
        spec.exact_node_limit = None;
        assert!(matches!(run_sweep(&spec), Err(Error::InvalidSweep(_))));
    }

    #[test]
    fn spec_document_defaults() {
        let spec = SweepSpec::from_json(r#"{"swept": "beta", "values": [1, 2], "algorithms": ["local"]}"#).unwrap();
        assert_eq!(spec.replications, 20);
        assert_eq!(spec.exact_node_limit, Some(DEFAULT_EXACT_NODE_LIMIT));
        assert_eq!(spec.base, GenerationParams::default());
        assert!(SweepSpec::from_json(r#"{"swept": "beta", "values": [1], "algorithms": ["local"], "x": 1}"#).is_err());
        assert_eq!(SweepSpec::from_json(&spec.to_json().unwrap()).unwrap(), spec);
    }
}
