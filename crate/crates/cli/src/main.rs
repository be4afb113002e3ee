mod lists;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fdbackhaul::engine::{write_aggregate_csv, write_results_csv};
use fdbackhaul::oracle::solve_exact;
use fdbackhaul::phy::{dbm_per_mhz_to_w_per_hz, friis_constant};
use fdbackhaul::{
    aggregate, generate, run_sweep, FrameTiming, GenerationParams, RadioConstants, Scenario,
    Schedule, SchedulerKind, SweepAxis, SweepSpec,
};
use serde_json::json;

const ALL_SCHEDULERS: &str = "proposed-fd,proposed-hd,mqis,tdma,fdp";

/// Full-duplex mmWave backhaul scheduling simulator.
#[derive(Debug, Parser)]
#[command(name = "fdbackhaul", version)]
struct Cli {
    /// Worker threads for sweeps [default: available parallelism]
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a random scenario and write it as JSON.
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        /// Number of flows
        #[arg(long, default_value_t = 30)]
        flows: usize,
        /// Scenario seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file [default: standard output]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Schedule one scenario with each scheduler and report the metrics.
    Run {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        select: Select,
        /// Output format
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write each schedule as `<scheduler>.schedule.json` here
        #[arg(long)]
        schedules_dir: Option<PathBuf>,
    },
    /// Sweep the number of flows.
    SweepFlows {
        /// Flow counts, e.g. `30,40,...,90`
        #[arg(long, default_value = "30,40,...,90", value_parser = lists::parse_values)]
        values: AxisValues,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Sweep the order of magnitude x of the self-interference factor:
    /// β ~ U[β_low·10^x, β_high·10^x].
    SweepBeta {
        /// Magnitudes x
        #[arg(long, default_value = "0,1,2,3,4", value_parser = lists::parse_values, allow_hyphen_values = true)]
        magnitudes: AxisValues,
        /// Number of flows
        #[arg(long, default_value_t = 90)]
        flows: usize,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Sweep the contention threshold σ = 10^x.
    SweepSigma {
        /// Magnitudes x
        #[arg(long, default_value = "-6..-1", value_parser = lists::parse_values, allow_hyphen_values = true)]
        magnitudes: AxisValues,
        /// Number of flows
        #[arg(long, default_value_t = 90)]
        flows: usize,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Check a scenario file, and optionally a schedule against it.
    Validate {
        /// Scenario JSON
        #[arg(long)]
        scenario: PathBuf,
        /// Schedule JSON as written by `run --schedules-dir`
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
    /// Exact optimum of a small scenario (at most 6 flows), compared with
    /// every scheduler. Prints JSON.
    Oracle {
        #[command(flatten)]
        source: Source,
    },
}

type AxisValues = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Generation parameters, in the units shown.
#[derive(Debug, Clone, Args)]
struct GenArgs {
    /// Number of base stations
    #[arg(long, default_value_t = 10)]
    bs: usize,
    /// Side of the square deployment area, m
    #[arg(long, default_value_t = 100.0)]
    area_m: f64,
    /// Lower end of the QoS range, Gbps
    #[arg(long, default_value_t = 1.0)]
    qos_min_gbps: f64,
    /// Upper end of the QoS range, Gbps
    #[arg(long, default_value_t = 3.0)]
    qos_max_gbps: f64,
    /// Lower end of the self-interference factor range (linear)
    #[arg(long, default_value_t = 2.0)]
    beta_low: f64,
    /// Upper end of the self-interference factor range (linear)
    #[arg(long, default_value_t = 4.0)]
    beta_high: f64,
    /// Contention threshold σ on relative interference
    #[arg(long, default_value_t = 1e-3)]
    sigma: f64,
    /// Slots per frame
    #[arg(long, default_value_t = 2000)]
    slots: usize,
    /// Slot duration, µs
    #[arg(long, default_value_t = 18.0)]
    slot_us: f64,
    /// Scheduling phase duration, µs
    #[arg(long, default_value_t = 850.0)]
    scheduling_us: f64,
    /// Transmit power, mW
    #[arg(long, default_value_t = 1000.0)]
    tx_power_mw: f64,
    /// Noise power spectral density, dBm/MHz
    #[arg(long, default_value_t = -134.0, allow_hyphen_values = true)]
    noise_dbm_per_mhz: f64,
    /// Bandwidth, MHz
    #[arg(long, default_value_t = 1200.0)]
    bandwidth_mhz: f64,
    /// Half-power beamwidth, degrees
    #[arg(long, default_value_t = 30.0)]
    beamwidth_deg: f64,
    /// Wavelength, mm
    #[arg(long, default_value_t = 5.0)]
    wavelength_mm: f64,
    /// Path loss exponent
    #[arg(long, default_value_t = 2.0)]
    pathloss_exponent: f64,
    /// Multi-user interference factor ρ
    #[arg(long, default_value_t = 1.0)]
    mui_factor: f64,
    /// Transceiver efficiency η
    #[arg(long, default_value_t = 0.5)]
    efficiency: f64,
}

impl GenArgs {
    fn params(&self, num_flows: usize) -> Result<GenerationParams> {
        let wavelength_m = self.wavelength_mm * 1e-3;
        let constants = RadioConstants {
            wavelength_m,
            tx_power_w: self.tx_power_mw * 1e-3,
            pathloss_exponent: self.pathloss_exponent,
            mui_factor: self.mui_factor,
            efficiency: self.efficiency,
            bandwidth_hz: self.bandwidth_mhz * 1e6,
            noise_psd_w_per_hz: dbm_per_mhz_to_w_per_hz(self.noise_dbm_per_mhz),
            pathloss_constant: friis_constant(wavelength_m),
            halfpower_beamwidth_deg: self.beamwidth_deg,
        };
        let problems = constants.check();
        if !problems.is_empty() {
            bail!("invalid radio constants: {}", problems.join("; "));
        }
        let timing = FrameTiming {
            slot_duration_s: self.slot_us * 1e-6,
            scheduling_phase_s: self.scheduling_us * 1e-6,
            num_slots: self.slots,
        };
        if !(timing.slot_duration_s > 0.0 && timing.scheduling_phase_s >= 0.0) || timing.num_slots == 0
        {
            bail!("frame timing needs positive slots and a nonnegative scheduling phase");
        }
        if !(self.sigma > 0.0) {
            bail!("sigma must be positive, got {}", self.sigma);
        }
        Ok(GenerationParams {
            num_bs: self.bs,
            area_m: self.area_m,
            num_flows,
            qos_range_bps: (self.qos_min_gbps * 1e9, self.qos_max_gbps * 1e9),
            beta_range: (self.beta_low, self.beta_high),
            constants,
            timing,
            sigma: self.sigma,
        })
    }
}

/// A scenario file, or generation parameters and a seed.
#[derive(Debug, Clone, Args)]
struct Source {
    /// Scenario JSON; generation flags are ignored when given
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Number of flows when generating
    #[arg(long, default_value_t = 30)]
    flows: usize,
    /// Scenario seed when generating
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    gen: GenArgs,
}

impl Source {
    fn load(&self) -> Result<Scenario> {
        match &self.scenario {
            Some(path) => {
                Scenario::load(path).with_context(|| format!("reading {}", path.display()))
            }
            None => Ok(generate(self.seed, &self.gen.params(self.flows)?)?),
        }
    }
}

#[derive(Debug, Clone, Args)]
struct Select {
    /// Comma-separated schedulers: proposed-fd, proposed-hd, mqis, tdma, fdp
    #[arg(long, default_value = ALL_SCHEDULERS, value_parser = parse_schedulers)]
    schedulers: SchedulerList,
}

#[derive(Debug, Clone)]
struct SchedulerList(Vec<SchedulerKind>);

fn parse_schedulers(text: &str) -> Result<SchedulerList, String> {
    let kinds = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<SchedulerKind>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if kinds.is_empty() {
        return Err("at least one scheduler is required".into());
    }
    Ok(SchedulerList(kinds))
}

#[derive(Debug, Clone, Args)]
struct SweepArgs {
    /// Trials per axis value
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Master seed; trial t uses the same scenario seed at every axis value
    #[arg(long, default_value_t = 2018)]
    seed: u64,
    #[command(flatten)]
    select: Select,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output directory
    #[arg(long, env = "FDBACKHAUL_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(flatten)]
    gen: GenArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let workers = cli.workers.map(|w| w as usize).unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    match cli.command {
        Command::Generate {
            gen,
            flows,
            seed,
            out,
        } => {
            let scenario = generate(seed, &gen.params(flows)?)?;
            let text = scenario.to_json()?;
            match out {
                Some(path) => {
                    fs::write(&path, text + "\n")
                        .with_context(|| format!("writing {}", path.display()))?;
                    eprintln!("wrote {}", path.display());
                }
                None => println!("{text}"),
            }
            Ok(())
        }
        Command::Run {
            source,
            select,
            format,
            schedules_dir,
        } => run_once(&source, &select.schedulers.0, format, schedules_dir.as_deref()),
        Command::SweepFlows { values, sweep } => {
            sweep_cmd("flows", SweepAxis::NumFlows, values, 30, sweep, workers)
        }
        Command::SweepBeta {
            magnitudes,
            flows,
            sweep,
        } => sweep_cmd("beta", SweepAxis::BetaMagnitude, magnitudes, flows, sweep, workers),
        Command::SweepSigma {
            magnitudes,
            flows,
            sweep,
        } => sweep_cmd("sigma", SweepAxis::SigmaMagnitude, magnitudes, flows, sweep, workers),
        Command::Validate { scenario, schedule } => validate_cmd(&scenario, schedule.as_deref()),
        Command::Oracle { source } => oracle_cmd(&source),
    }
}

fn run_once(
    source: &Source,
    kinds: &[SchedulerKind],
    format: Format,
    schedules_dir: Option<&Path>,
) -> Result<()> {
    let scenario = source.load()?;
    let mut results = Vec::new();
    for &kind in kinds {
        let schedule = kind.schedule(&scenario)?;
        let metrics = fdbackhaul::engine::evaluate(&schedule, &scenario)?;
        if let Some(dir) = schedules_dir {
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{kind}.schedule.json"));
            fs::write(&path, schedule.to_json()? + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
        }
        results.push((kind, metrics));
    }

    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Csv => {
            writeln!(out, "scheduler,completed,throughput_gbps")?;
            for (kind, m) in &results {
                writeln!(out, "{kind},{},{}", m.completed_count, m.system_throughput / 1e9)?;
            }
        }
        Format::Json => {
            let value: Vec<_> = results
                .iter()
                .map(|(kind, m)| json!({ "scheduler": kind, "metrics": m }))
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
        }
    }
    Ok(())
}

fn sweep_cmd(
    stem: &str,
    axis: SweepAxis,
    values: Vec<f64>,
    num_flows: usize,
    args: SweepArgs,
    workers: usize,
) -> Result<()> {
    let spec = SweepSpec {
        axis,
        axis_values: values,
        trials: args.trials as usize,
        base: args.gen.params(num_flows)?,
    };
    // reject bad axis values before any work or output
    for &v in &spec.axis_values {
        axis.apply(&spec.base, v)?;
    }
    let kinds = &args.select.schedulers.0;
    eprintln!(
        "{}: {} values x {} trials x {} schedulers on {workers} workers",
        axis.name(),
        spec.axis_values.len(),
        spec.trials,
        kinds.len()
    );
    let started = Instant::now();
    let rows = run_sweep(&spec, kinds, args.seed, Some(workers))?;
    let agg = aggregate(&rows);
    eprintln!("{}: finished in {:.1?}", axis.name(), started.elapsed());

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    match args.format {
        Format::Csv => {
            let results = args.out_dir.join(format!("{stem}_results.csv"));
            let summary = args.out_dir.join(format!("{stem}_aggregate.csv"));
            write_results_csv(&rows, create(&results)?)?;
            write_aggregate_csv(&agg, create(&summary)?)?;
            eprintln!("wrote {} and {}", results.display(), summary.display());
        }
        Format::Json => {
            let path = args.out_dir.join(format!("{stem}.json"));
            let value = json!({
                "master_seed": args.seed,
                "spec": spec,
                "rows": rows,
                "aggregate": agg,
            });
            fs::write(&path, serde_json::to_string_pretty(&value)? + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<io::BufWriter<fs::File>> {
    let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(io::BufWriter::new(file))
}

fn validate_cmd(scenario_path: &Path, schedule_path: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(scenario_path)
        .with_context(|| format!("reading {}", scenario_path.display()))?;
    let scenario: Scenario = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", scenario_path.display()))?;
    let mut problems: Vec<String> = match scenario.validate() {
        Ok(()) => Vec::new(),
        Err(v) => v.iter().map(|v| format!("scenario {v}")).collect(),
    };
    if let (Some(path), true) = (schedule_path, problems.is_empty()) {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let schedule = Schedule::from_json(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        if let Err(v) = schedule.validate(&scenario) {
            problems.extend(v.iter().map(|v| format!("schedule {v}")));
        }
    }
    if problems.is_empty() {
        println!("valid");
        Ok(())
    } else {
        for p in &problems {
            println!("{p}");
        }
        bail!("{} violation(s)", problems.len())
    }
}

fn oracle_cmd(source: &Source) -> Result<()> {
    let scenario = source.load()?;
    let (best, allocation) = solve_exact(&scenario)?;
    let mut schedulers = serde_json::Map::new();
    for kind in SchedulerKind::ALL {
        let m = fdbackhaul::run_trial_with(&scenario, kind)?;
        schedulers.insert(kind.to_string(), json!(m.completed_count));
    }
    let value = json!({
        "optimum": best,
        "allocation": allocation
            .counts
            .iter()
            .map(|(set, slots)| json!({ "flows": set.flows, "slots": slots }))
            .collect::<Vec<_>>(),
        "schedulers": schedulers,
    });
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}
