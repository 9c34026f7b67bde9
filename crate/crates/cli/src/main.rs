//! `edgesched`: generate scenarios, solve them, validate assignments and run sweeps.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 infeasible instance or
//! failed validation, 3 solver limit reached or instance too large.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use edgesched_core::exact::{brute_force, build_milp, solve, SolveOptions, SolveStatus};
use edgesched_core::experiment::{
    desk_scale, preset, render_svg, run_sweep_with, summarize, write_csv, write_summary_csv, DeskScale, Metric,
    RunOptions, SweepSpec,
};
use edgesched_core::scenario::{generate, load_file, save, GenerationParams};
use edgesched_core::{evaluate_objective, global_serving, local_serving, validate, Assignment, CostReport, Error, Mode};
use serde::{Deserialize, Serialize};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "edgesched", version, about = "Service placement and task scheduling on edge-to-cloud platforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a scenario from generation parameters and a seed.
    Gen(GenArgs),
    /// Solve a scenario with the exact solver or a heuristic.
    Solve(SolveArgs),
    /// Check an assignment against every constraint.
    Validate(ValidateArgs),
    /// Run a parameter sweep and write raw rows (CSV) or a chart (SVG).
    Sweep(SweepArgs),
    /// Solve a tiny scenario by exhaustive enumeration.
    Oracle(OracleArgs),
}

#[derive(clap::Args, Debug)]
struct GenArgs {
    /// Generation parameters document; missing keys take the defaults.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tasks: Option<usize>,
    #[arg(long)]
    services: Option<usize>,
    #[arg(long)]
    cloudlets: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    qos_factor: Option<f64>,
    /// Draw from the endpoints of each range instead of the whole interval.
    #[arg(long)]
    discrete: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Alg {
    Exact,
    Local,
    Global,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
enum ModeArg {
    QosAware,
    QosLess,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::QosAware => Mode::QosAware,
            ModeArg::QosLess => Mode::QosLess,
        }
    }
}

#[derive(clap::Args, Debug)]
struct SolveArgs {
    scenario: PathBuf,
    #[arg(long, value_enum)]
    alg: Alg,
    /// Deadline handling for the exact solver.
    #[arg(long, value_enum, default_value = "qos_aware")]
    mode: ModeArg,
    /// Writes the solution document (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Prints the solution document instead of the text summary.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    time_limit_ms: Option<u64>,
    /// Also writes the MILP model (JSON) for an external solver.
    #[arg(long)]
    emit_milp: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct ValidateArgs {
    scenario: PathBuf,
    /// A solution document from `solve` or a bare assignment.
    assignment: PathBuf,
    /// `qos_less` ignores deadline records.
    #[arg(long, value_enum, default_value = "qos_aware")]
    mode: ModeArg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Svg,
    SummaryCsv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MetricArg {
    Objective,
    Drop,
}

#[derive(clap::Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["spec", "preset"])))]
struct SweepArgs {
    /// Sweep spec document.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Built-in grid: users, defense, qos or beta.
    #[arg(long)]
    preset: Option<String>,
    /// Shrink task and service counts so the exact solver can take part.
    #[arg(long)]
    desk: bool,
    #[arg(long, default_value_t = 10.0, requires = "desk")]
    task_divisor: f64,
    #[arg(long, default_value_t = 50.0, requires = "desk")]
    service_divisor: f64,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed_base: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Quantity plotted by `--format svg`.
    #[arg(long, value_enum, default_value = "objective")]
    metric: MetricArg,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct OracleArgs {
    scenario: PathBuf,
    #[arg(long, value_enum, default_value = "qos_aware")]
    mode: ModeArg,
    /// Maximum number of task-to-node maps to enumerate.
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// Machine-readable result of `solve` and `oracle`.
#[derive(Serialize, Deserialize, Debug)]
struct SolutionDoc {
    algorithm: String,
    mode: Mode,
    status: String,
    assignment: Option<Assignment>,
    report: Option<CostReport>,
    nodes_explored: Option<u64>,
    runtime_ms: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::InstanceTooLarge { .. }) => EXIT_LIMIT,
                _ => EXIT_USAGE,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => match io::stdout().lock().write_all(bytes) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            other => other.context("writing stdout"),
        },
    }
}

fn cmd_gen(args: GenArgs) -> Result<u8> {
    let mut params = match &args.params {
        Some(path) => GenerationParams::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?,
        None => GenerationParams::default(),
    };
    if let Some(v) = args.tasks {
        params.num_tasks = v;
    }
    if let Some(v) = args.services {
        params.num_services = v;
    }
    if let Some(v) = args.cloudlets {
        params.num_cloudlets = v;
    }
    if let Some(v) = args.beta {
        params.beta = v;
    }
    if let Some(v) = args.qos_factor {
        params.qos_factor = v;
    }
    params.draw_discrete |= args.discrete;
    let scenario = generate(&params, args.seed)?;
    let mut text = save(&scenario)?;
    text.push('\n');
    emit(args.out.as_deref(), text.as_bytes())?;
    Ok(0)
}

fn summary_text(doc: &SolutionDoc, tasks: usize) -> String {
    let mut s = format!("algorithm   {} ({})\nstatus      {}\n", doc.algorithm, doc.mode.as_str(), doc.status);
    if let (Some(a), Some(r)) = (&doc.assignment, &doc.report) {
        s += &format!("total       {} (placement {}, scheduling {})\n", r.total, r.placement_cost, r.scheduling_cost);
        s += &format!("placements  {}\n", a.placements.len());
        s += &format!("served      {}/{} tasks, {} unserved\n", a.schedules.len(), tasks, a.unserved.len());
        s += &format!("drops       {} ({:.4})\n", r.drop_count, r.drop_fraction);
        s += &format!("violations  {}\n", r.violations.len());
    }
    if let Some(n) = doc.nodes_explored {
        s += &format!("nodes       {n}\n");
    }
    s + &format!("runtime_ms  {:.3}\n", doc.runtime_ms)
}

fn finish(doc: &SolutionDoc, tasks: usize, out: Option<&Path>, json: bool) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    if let Some(path) = out {
        emit(Some(path), text.as_bytes())?;
    }
    if json {
        emit(None, text.as_bytes())
    } else {
        emit(None, summary_text(doc, tasks).as_bytes())
    }
}

fn exit_for(status: SolveStatus) -> u8 {
    match status {
        SolveStatus::Optimal => 0,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        SolveStatus::LimitReached => EXIT_LIMIT,
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8> {
    let scenario = load_file(&args.scenario).with_context(|| format!("loading {}", args.scenario.display()))?;
    let mode = Mode::from(args.mode);
    if let Some(path) = &args.emit_milp {
        let mut text = build_milp(&scenario, mode)?.to_json()?;
        text.push('\n');
        emit(Some(path), text.as_bytes())?;
    }
    let (doc, code) = match args.alg {
        Alg::Exact => {
            let options = SolveOptions {
                mode,
                node_limit: args.node_limit,
                time_limit: args.time_limit_ms.map(Duration::from_millis),
                ..Default::default()
            };
            let out = solve(&scenario, &options)?;
            let doc = SolutionDoc {
                algorithm: "exact".into(),
                mode,
                status: out.status.as_str().into(),
                assignment: out.assignment,
                report: out.report,
                nodes_explored: Some(out.nodes_explored),
                runtime_ms: out.runtime.as_secs_f64() * 1e3,
            };
            (doc, exit_for(out.status))
        }
        Alg::Local | Alg::Global => {
            if mode != Mode::QosAware {
                bail!("heuristics always respect deadlines; --mode qos_less applies to --alg exact only");
            }
            let start = std::time::Instant::now();
            let assignment =
                if args.alg == Alg::Local { local_serving(&scenario) } else { global_serving(&scenario) };
            let report = evaluate_objective(&scenario, &assignment)?;
            let complete = assignment.unserved.is_empty();
            let doc = SolutionDoc {
                algorithm: if args.alg == Alg::Local { "local" } else { "global" }.into(),
                mode,
                status: if complete { "feasible" } else { "partial" }.into(),
                assignment: Some(assignment),
                report: Some(report),
                nodes_explored: None,
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            (doc, if complete { 0 } else { EXIT_INFEASIBLE })
        }
    };
    finish(&doc, scenario.tasks.len(), args.out.as_deref(), args.json)?;
    Ok(code)
}

fn cmd_validate(args: ValidateArgs) -> Result<u8> {
    let scenario = load_file(&args.scenario).with_context(|| format!("loading {}", args.scenario.display()))?;
    let text = read(&args.assignment)?;
    let assignment = match serde_json::from_str::<SolutionDoc>(&text) {
        Ok(SolutionDoc { assignment: Some(a), .. }) => a,
        Ok(doc) => bail!("{} holds no assignment (status {})", args.assignment.display(), doc.status),
        Err(_) => serde_json::from_str::<Assignment>(&text)
            .with_context(|| format!("parsing {} as a solution or an assignment", args.assignment.display()))?,
    };
    let mode = Mode::from(args.mode);
    // dangling references are input errors, not violations
    evaluate_objective(&scenario, &assignment)?;
    let violations: Vec<_> = validate(&scenario, &assignment).into_iter().filter(|v| mode.enforces(v.constraint)).collect();
    let mut text: String = violations.iter().map(|v| format!("{v}\n")).collect();
    if violations.is_empty() {
        text += "ok: no violations\n";
    } else {
        text += &format!("{} violation(s)\n", violations.len());
    }
    emit(None, text.as_bytes())?;
    Ok(if violations.is_empty() { 0 } else { EXIT_INFEASIBLE })
}

fn cmd_sweep(args: SweepArgs) -> Result<u8> {
    let mut spec = match (&args.spec, &args.preset) {
        (Some(path), _) => SweepSpec::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))?,
        (None, Some(name)) => preset(name)?,
        (None, None) => unreachable!("clap requires one source"),
    };
    if args.desk {
        let scale = DeskScale { task_divisor: args.task_divisor, service_divisor: args.service_divisor };
        spec = desk_scale(&spec, scale)?;
    }
    if let Some(r) = args.replications {
        spec.replications = r;
    }
    if let Some(s) = args.seed_base {
        spec.seed_base = s;
    }
    let options = RunOptions { workers: args.workers, ..Default::default() };
    let result = run_sweep_with(&spec, &options)?;
    let mut buf = Vec::new();
    match args.format {
        Format::Csv => write_csv(&result, &mut buf)?,
        Format::SummaryCsv => write_summary_csv(&summarize(&result), &mut buf)?,
        Format::Svg => {
            let metric = match args.metric {
                MetricArg::Objective => Metric::Objective,
                MetricArg::Drop => Metric::DropFraction,
            };
            buf = render_svg(&summarize(&result), metric).into_bytes();
        }
    }
    emit(args.out.as_deref(), &buf)?;
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8> {
    let scenario = load_file(&args.scenario).with_context(|| format!("loading {}", args.scenario.display()))?;
    let mode = Mode::from(args.mode);
    let mut options = SolveOptions::with_mode(mode);
    if let Some(cap) = args.cap {
        options.enumeration_cap = cap;
    }
    let out = brute_force(&scenario, &options)?;
    let doc = SolutionDoc {
        algorithm: "brute_force".into(),
        mode,
        status: out.status.as_str().into(),
        assignment: out.assignment,
        report: out.report,
        nodes_explored: Some(out.nodes_explored),
        runtime_ms: out.runtime.as_secs_f64() * 1e3,
    };
    finish(&doc, scenario.tasks.len(), args.out.as_deref(), args.json)?;
    Ok(exit_for(out.status))
}
