use super::{Algorithm, SweepSpec, SweptParam};
use crate::error::{Error, Result};
use crate::scenario::GenerationParams;

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 4] = ["users", "defense", "qos", "beta"];

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

/// Full-scale sweep grids over the default generator parameters.
///
/// * `users`: `num_tasks` 300..=500 step 25; exact, global, local.
/// * `defense`: `num_tasks` 50..=500 step 50; exact with and without deadlines.
/// * `qos`: `qos_factor` 2.5..=5.0 step 0.5; exact, global, local.
/// * `beta`: `beta` 1..=6; exact, global, local.
pub fn preset(name: &str) -> Result<SweepSpec> {
    let compare = vec![Algorithm::Exact, Algorithm::Global, Algorithm::Local];
    let base = GenerationParams::default();
    let (swept, values, algorithms) = match name {
        "users" => (SweptParam::NumTasks, grid(300.0, 500.0, 25.0), compare),
        "defense" => (SweptParam::NumTasks, grid(50.0, 500.0, 50.0), vec![Algorithm::Exact, Algorithm::ExactQosLess]),
        "qos" => (SweptParam::QosFactor, grid(2.5, 5.0, 0.5), compare),
        "beta" => (SweptParam::Beta, grid(1.0, 6.0, 1.0), compare),
        other => return Err(Error::InvalidSweep(format!("unknown preset {other:?}; expected one of {PRESETS:?}"))),
    };
    Ok(SweepSpec::new(swept, values, base, algorithms))
}

/// Shrinks task and service counts so the builtin exact solver can take part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeskScale {
    pub task_divisor: f64,
    pub service_divisor: f64,
}

impl Default for DeskScale {
    fn default() -> Self {
        DeskScale { task_divisor: 10.0, service_divisor: 50.0 }
    }
}

fn shrink(n: f64, divisor: f64) -> f64 {
    (n / divisor).round().max(1.0)
}

/// Divides `num_tasks` (base and swept values) and `num_services`, rounding to
/// the nearest whole number. Swept values that collapse onto each other are
/// merged.
pub fn desk_scale(spec: &SweepSpec, scale: DeskScale) -> Result<SweepSpec> {
    if !(scale.task_divisor >= 1.0 && scale.service_divisor >= 1.0) {
        return Err(Error::InvalidSweep("desk-scale divisors must be at least 1".into()));
    }
    let mut out = spec.clone();
    out.base.num_tasks = shrink(spec.base.num_tasks as f64, scale.task_divisor) as usize;
    out.base.num_services = shrink(spec.base.num_services as f64, scale.service_divisor) as usize;
    if spec.swept == SweptParam::NumTasks {
        out.values = spec.values.iter().map(|&v| shrink(v, scale.task_divisor)).collect();
        out.values.dedup();
    }
    out.validate()?;
    Ok(out)
}
