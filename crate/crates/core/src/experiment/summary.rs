use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Algorithm, SweepResult, SweepRow, SweptParam};

/// Means over the included rows of one `(swept_value, algorithm)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub swept_param: SweptParam,
    pub swept_value: f64,
    pub algorithm: Algorithm,
    pub mean_objective: Option<f64>,
    pub mean_drop_fraction: Option<f64>,
    pub mean_runtime_ms: Option<f64>,
    /// Rows that entered the means.
    pub included: usize,
    /// Rows left out of the means.
    pub excluded: usize,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn aggregate(rows: &[&SweepRow], excluded: usize) -> SummaryRow {
    let first = rows[0];
    let inc: Vec<&&SweepRow> = rows.iter().filter(|r| r.status.is_included()).collect();
    SummaryRow {
        swept_param: first.swept_param,
        swept_value: first.swept_value,
        algorithm: first.algorithm,
        mean_objective: mean(inc.iter().filter_map(|r| r.objective_total)),
        mean_drop_fraction: mean(inc.iter().filter_map(|r| r.drop_fraction)),
        mean_runtime_ms: mean(inc.iter().map(|r| r.runtime_ms)),
        included: inc.len(),
        excluded: rows.len() - inc.len() + excluded,
    }
}

/// Groups rows by `(swept_value, algorithm)` in order of first appearance.
fn groups(result: &SweepResult) -> Vec<Vec<&SweepRow>> {
    let mut order: Vec<(u64, Algorithm)> = Vec::new();
    let mut map: BTreeMap<(u64, Algorithm), Vec<&SweepRow>> = BTreeMap::new();
    for row in &result.rows {
        let key = (row.swept_value.to_bits(), row.algorithm);
        map.entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(row);
    }
    order.into_iter().map(|k| map.remove(&k).unwrap_or_default()).collect()
}

/// Per `(value, algorithm)` means over every row that produced an assignment.
/// Infeasible and limit-reached exact rows are excluded; heuristic rows with
/// unserved tasks stay in, so their drop fraction shows up in the means.
pub fn summarize(result: &SweepResult) -> Vec<SummaryRow> {
    groups(result).iter().map(|g| aggregate(g, 0)).collect()
}

/// Like-for-like cost comparison: a replication only counts when every
/// algorithm run on its scenario served all tasks (status optimal or feasible),
/// so all means at a value cover the same scenarios and the same work.
pub fn summarize_paired(result: &SweepResult) -> Vec<SummaryRow> {
    let mut broken: BTreeSet<(u64, usize)> = BTreeSet::new();
    for row in &result.rows {
        if !row.status.is_complete() {
            broken.insert((row.swept_value.to_bits(), row.replication));
        }
    }
    groups(result)
        .iter()
        .map(|g| {
            let kept: Vec<&SweepRow> =
                g.iter().copied().filter(|r| !broken.contains(&(r.swept_value.to_bits(), r.replication))).collect();
            if kept.is_empty() {
                let mut empty = aggregate(g, 0);
                empty.mean_objective = None;
                empty.mean_drop_fraction = None;
                empty.mean_runtime_ms = None;
                empty.excluded = g.len();
                empty.included = 0;
                empty
            } else {
                aggregate(&kept, g.len() - kept.len())
            }
        })
        .collect()
}
