use std::fmt::Write as _;
use std::io::{Read, Write};

use super::{Algorithm, SummaryRow, SweepResult, SweepRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "swept_param,swept_value,replication,seed,algorithm,status,objective_total,\
placement_cost,scheduling_cost,drop_fraction,runtime_ms";

const SUMMARY_HEADER: &str =
    "swept_param,swept_value,algorithm,mean_objective,mean_drop_fraction,mean_runtime_ms,included,excluded";

fn write_rows<T: serde::Serialize>(out: impl Write, header: &str, rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Raw rows; absent values are written as empty fields.
pub fn write_csv(result: &SweepResult, out: impl Write) -> Result<()> {
    write_rows(out, CSV_HEADER, &result.rows)
}

pub fn write_summary_csv(summary: &[SummaryRow], out: impl Write) -> Result<()> {
    write_rows(out, SUMMARY_HEADER, summary)
}

pub fn parse_csv(input: impl Read) -> Result<SweepResult> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::InvalidSweep(format!("unexpected CSV header {:?}", header.join(","))));
    }
    let rows = r.deserialize::<SweepRow>().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(SweepResult { rows })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Objective,
    DropFraction,
}

impl Metric {
    fn label(self) -> &'static str {
        match self {
            Metric::Objective => "mean objective",
            Metric::DropFraction => "mean drop fraction",
        }
    }

    fn pick(self, row: &SummaryRow) -> Option<f64> {
        match self {
            Metric::Objective => row.mean_objective,
            Metric::DropFraction => row.mean_drop_fraction,
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn tick(v: f64) -> String {
    if v.abs() >= 100.0 || v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}").trim_end_matches('0').trim_end_matches('.').to_owned()
    }
}

/// Line chart of one metric against the swept value, one polyline per algorithm.
pub fn render_svg(summary: &[SummaryRow], metric: Metric) -> String {
    let xs: Vec<f64> = summary.iter().map(|r| r.swept_value).collect();
    let ys: Vec<f64> = summary.iter().filter_map(|r| metric.pick(r)).collect();
    let (x0, x1) = span(&xs);
    let (y0, y1) = span(&ys);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| HEIGHT - BOTTOM - (y - y0) / (y1 - y0) * (HEIGHT - TOP - BOTTOM);
    let x_label = summary.first().map_or("value", |r| r.swept_param.as_str());

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let (ax0, ax1, ay0, ay1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(svg, r#"<path d="M{ax0} {ay0} V{ay1} H{ax1}" fill="none" stroke="black"/>"#);

    let mut ticks: Vec<f64> = xs.clone();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    for &x in &ticks {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(x),
            ay1 + 16.0,
            tick(x)
        );
    }
    for i in 0..=4 {
        let y = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            ax0 - 6.0,
            py(y) + 4.0,
            tick(y)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        (ax0 + ax1) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (ay0 + ay1) / 2.0,
        metric.label()
    );

    let mut algorithms: Vec<Algorithm> = Vec::new();
    for r in summary {
        if !algorithms.contains(&r.algorithm) {
            algorithms.push(r.algorithm);
        }
    }
    for (i, alg) in algorithms.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = summary
            .iter()
            .filter(|r| r.algorithm == *alg)
            .filter_map(|r| metric.pick(r).map(|y| format!("{:.2},{:.2}", px(r.swept_value), py(y))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-algorithm="{alg}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{alg}</text>"#,
            ax1 + 15.0,
            ax1 + 35.0,
            ax1 + 40.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn span(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}
