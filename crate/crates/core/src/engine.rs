//! Trial execution and seeded Monte Carlo sweeps.
//!
//! Trial `t` of a sweep with master seed `s` draws its scenario from
//! [`derive_seed`]`(s, t)` at every axis point, and the same scenario is
//! handed to every scheduler. Comparisons are therefore paired across
//! schedulers and use common random numbers across axis points: the
//! generator's draw order makes a σ sweep reuse one scenario verbatim, a β
//! sweep rescale the same β draws, and a flow-count sweep extend the same
//! flow list.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::LinkBudget;
use crate::scenario::{generate, GenerationParams, Scenario};
use crate::schedule::Schedule;
use crate::schedulers::SchedulerKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub completed_count: usize,
    /// Sum of per-flow frame throughputs, bits/s.
    pub system_throughput: f64,
    pub per_flow_throughput: Vec<f64>,
    pub per_flow_completed: Vec<bool>,
}

impl TrialMetrics {
    pub(crate) fn from_throughputs(per_flow_throughput: Vec<f64>, scenario: &Scenario) -> Self {
        let per_flow_completed: Vec<bool> = per_flow_throughput
            .iter()
            .zip(&scenario.flows)
            .map(|(&t, f)| t >= f.qos_bps)
            .collect();
        Self {
            completed_count: per_flow_completed.iter().filter(|&&c| c).count(),
            system_throughput: per_flow_throughput.iter().sum(),
            per_flow_throughput,
            per_flow_completed,
        }
    }
}

/// Replays `schedule` slot by slot and measures every flow's frame throughput.
pub fn evaluate(schedule: &Schedule, scenario: &Scenario) -> Result<TrialMetrics> {
    schedule.validate(scenario).map_err(Error::Invalid)?;
    let links = LinkBudget::new(scenario)?;
    let dt = scenario.timing.slot_duration_s;
    let mut bits = vec![0.0; scenario.num_flows()];
    let mut last: Option<(Vec<usize>, Vec<f64>)> = None;
    for slot in 0..schedule.num_slots() {
        let active = schedule.active_in(slot);
        let rates = match &last {
            Some((set, rates)) if *set == active => rates.clone(),
            _ => links.rates(&active),
        };
        for (&f, &r) in active.iter().zip(&rates) {
            bits[f] += r * dt;
        }
        last = Some((active, rates));
    }
    let frame = scenario.timing.frame_duration();
    let throughput = bits.into_iter().map(|b| b / frame).collect();
    Ok(TrialMetrics::from_throughputs(throughput, scenario))
}

pub fn run_trial_with(scenario: &Scenario, kind: SchedulerKind) -> Result<TrialMetrics> {
    evaluate(&kind.schedule(scenario)?, scenario)
}

/// Schedules `scenario` with the named strategy and measures the result.
pub fn run_trial(scenario: &Scenario, scheduler: &str) -> Result<TrialMetrics> {
    run_trial_with(scenario, scheduler.parse()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    NumFlows,
    /// `x` draws β from `[β_low·10^x, β_high·10^x]`.
    BetaMagnitude,
    /// `x` sets σ = 10^x.
    SigmaMagnitude,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::NumFlows => "num_flows",
            SweepAxis::BetaMagnitude => "beta_magnitude",
            SweepAxis::SigmaMagnitude => "sigma_magnitude",
        }
    }

    /// Generation parameters at one axis point.
    pub fn apply(self, base: &GenerationParams, value: f64) -> Result<GenerationParams> {
        let mut p = base.clone();
        match self {
            SweepAxis::NumFlows => {
                if !(value >= 0.0 && value.fract() == 0.0) {
                    return Err(Error::Config(format!("flow count {value} is not a count")));
                }
                p.num_flows = value as usize;
            }
            SweepAxis::BetaMagnitude => {
                let scale = 10f64.powf(value);
                p.beta_range = (base.beta_range.0 * scale, base.beta_range.1 * scale);
            }
            SweepAxis::SigmaMagnitude => p.sigma = 10f64.powf(value),
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub axis_values: Vec<f64>,
    pub trials: usize,
    pub base: GenerationParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scheduler: SchedulerKind,
    pub axis: SweepAxis,
    pub axis_value: f64,
    pub trial: usize,
    pub seed: u64,
    pub metrics: TrialMetrics,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Scenario seed for one trial: `splitmix64(splitmix64(master) ^ trial)`,
/// where `splitmix64(z)` is Vigna's SplitMix64 finalizer applied to
/// `z + 0x9E3779B97F4A7C15`.
pub fn derive_seed(master_seed: u64, trial: usize) -> u64 {
    splitmix64(splitmix64(master_seed) ^ trial as u64)
}

/// Runs every `(axis value, trial)` cell for each scheduler.
///
/// Rows come back ordered by axis index, then trial, then the order of
/// `schedulers`, whatever `workers` is. `workers = None` uses the global
/// rayon pool.
pub fn run_sweep(
    spec: &SweepSpec,
    schedulers: &[SchedulerKind],
    master_seed: u64,
    workers: Option<usize>,
) -> Result<Vec<SweepRow>> {
    if spec.trials == 0 {
        return Err(Error::Config("sweep needs at least one trial".into()));
    }
    if spec.axis_values.is_empty() {
        return Err(Error::Config("sweep needs at least one axis value".into()));
    }
    if schedulers.is_empty() {
        return Err(Error::Config("sweep needs at least one scheduler".into()));
    }
    let params = spec
        .axis_values
        .iter()
        .map(|&v| spec.axis.apply(&spec.base, v))
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, usize)> = (0..spec.axis_values.len())
        .flat_map(|a| (0..spec.trials).map(move |t| (a, t)))
        .collect();

    let run_cell = |&(a, t): &(usize, usize)| -> Result<Vec<SweepRow>> {
        let seed = derive_seed(master_seed, t);
        let scenario = generate(seed, &params[a])?;
        schedulers
            .iter()
            .map(|&kind| {
                Ok(SweepRow {
                    scheduler: kind,
                    axis: spec.axis,
                    axis_value: spec.axis_values[a],
                    trial: t,
                    seed,
                    metrics: run_trial_with(&scenario, kind)?,
                })
            })
            .collect()
    };

    let nested: Vec<Result<Vec<SweepRow>>> = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
            .install(|| cells.par_iter().map(run_cell).collect()),
        None => cells.par_iter().map(run_cell).collect(),
    };

    let mut rows = Vec::with_capacity(cells.len() * schedulers.len());
    for cell in nested {
        rows.extend(cell?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scheduler: SchedulerKind,
    pub axis_value: f64,
    pub trials: usize,
    pub mean_completed: f64,
    pub std_completed: f64,
    pub mean_throughput_gbps: f64,
    pub std_throughput_gbps: f64,
}

/// Sample mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Groups rows by `(scheduler, axis value)`; groups appear in first-seen
/// axis order, then scheduler order as listed in the rows.
pub fn aggregate(rows: &[SweepRow]) -> Vec<AggregateRow> {
    let mut keys: Vec<(f64, SchedulerKind)> = Vec::new();
    for r in rows {
        let key = (r.axis_value, r.scheduler);
        if !keys.iter().any(|k| k.0.to_bits() == key.0.to_bits() && k.1 == key.1) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(value, kind)| {
            let group: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.scheduler == kind && r.axis_value.to_bits() == value.to_bits())
                .collect();
            let completed: Vec<f64> = group
                .iter()
                .map(|r| r.metrics.completed_count as f64)
                .collect();
            let gbps: Vec<f64> = group
                .iter()
                .map(|r| r.metrics.system_throughput / 1e9)
                .collect();
            let (mean_completed, std_completed) = mean_std(&completed);
            let (mean_throughput_gbps, std_throughput_gbps) = mean_std(&gbps);
            AggregateRow {
                scheduler: kind,
                axis_value: value,
                trials: group.len(),
                mean_completed,
                std_completed,
                mean_throughput_gbps,
                std_throughput_gbps,
            }
        })
        .collect()
}

pub const RESULTS_HEADER: [&str; 7] = [
    "scheduler",
    "axis",
    "axis_value",
    "trial",
    "seed",
    "completed",
    "throughput_gbps",
];

pub const AGGREGATE_HEADER: [&str; 6] = [
    "scheduler",
    "axis_value",
    "mean_completed",
    "std_completed",
    "mean_throughput_gbps",
    "std_throughput_gbps",
];

pub fn write_results_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheduler.name().to_string(),
            r.axis.name().to_string(),
            r.axis_value.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.metrics.completed_count.to_string(),
            (r.metrics.system_throughput / 1e9).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheduler.name().to_string(),
            r.axis_value.to_string(),
            r.mean_completed.to_string(),
            r.std_completed.to_string(),
            r.mean_throughput_gbps.to_string(),
            r.std_throughput_gbps.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
