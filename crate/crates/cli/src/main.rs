use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sagin_relay::analytic::analytic_metrics;
use sagin_relay::montecarlo::{estimate_metrics, export_trace, simulate, summarize, SimulationOptions};
use sagin_relay::planner::{
    min_power, sweep, validate, MetricKind, PlannerOptions, SweepAxis, SweepAxisName, SweepQuantity, TargetKind,
};
use sagin_relay::stochastic::{FsoDeficit, SatelliteSampling};
use sagin_relay::model::load_config_file;
use sagin_relay::{Error, NetworkConfig};

/// Users per m² used unless `--full-scale` is given.
const DESK_USER_DENSITY: f64 = 1e-8;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "sagin-relay", version, about = "Relay-side rate metrics of a satellite-HAP-ground uplink")]
struct Cli {
    /// TOML config; omitted keys take the reference values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Keep the configured user density instead of capping it at 1e-8 per m²
    #[arg(long, global = true)]
    full_scale: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetArg {
    AbdrRatio,
    Brep,
}

impl From<TargetArg> for TargetKind {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::AbdrRatio => TargetKind::AbdrRatio,
            TargetArg::Brep => TargetKind::Brep,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Aadr,
    Abdr,
    Brep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SamplingArg {
    FullBpp,
    ContactAngle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DeficitArg {
    AtCap,
    AtZero,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form AADR, ABDR and BREP
    Analytic,
    /// Monte Carlo estimates
    Simulate {
        #[arg(long, default_value_t = 10_000)]
        rounds: usize,
        #[arg(long, default_value_t = SimulationOptions::default().seed)]
        seed: u64,
        /// Write one CSV row per round here
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SamplingArg::ContactAngle)]
        satellite_sampling: SamplingArg,
        #[arg(long, value_enum, default_value_t = DeficitArg::AtCap)]
        deficit: DeficitArg,
    },
    /// Analytic against simulated metrics
    Validate {
        #[arg(long, default_value_t = 10_000)]
        rounds: usize,
        #[arg(long, default_value_t = SimulationOptions::default().seed)]
        seed: u64,
    },
    /// Minimum HAP transmit power for a target
    PlanPower {
        #[arg(long, value_enum)]
        target_kind: TargetArg,
        #[arg(long)]
        target: f64,
        /// Upper limit of the power search, dBW
        #[arg(long, default_value_t = PlannerOptions::default().cap_dbw)]
        power_cap_dbw: f64,
        /// Re-check the solution with this many simulated rounds
        #[arg(long)]
        mc_check: Option<usize>,
    },
    /// Evaluate a metric or a power plan over a two-parameter grid
    Sweep {
        /// NAME=v1,v2,... with NAME one of sat_altitude (km), sat_count,
        /// hap_tx_power (dBW), user_density (per m²)
        #[arg(long)]
        axis1: String,
        #[arg(long)]
        axis2: String,
        #[arg(long, value_enum, conflicts_with_all = ["target_kind", "target"])]
        metric: Option<MetricArg>,
        #[arg(long, value_enum, requires = "target")]
        target_kind: Option<TargetArg>,
        #[arg(long, requires = "target_kind")]
        target: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Infeasible(String),
    Validation(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. } | Error::ConfigParse(_) => Failure::Config(e.to_string()),
            Error::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

fn load(cli: &Cli) -> Result<NetworkConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => load_config_file(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?,
        None => NetworkConfig::default(),
    };
    if !cli.full_scale && cfg.user_density > DESK_USER_DENSITY {
        cfg.user_density = DESK_USER_DENSITY;
    }
    cfg.validate().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(cfg)
}

fn parse_axis(arg: &str) -> Result<SweepAxis, Failure> {
    let (name, values) = arg
        .split_once('=')
        .ok_or_else(|| Failure::Other(format!("axis {arg:?} is not NAME=v1,v2,...")))?;
    let name: SweepAxisName = name.trim().parse().map_err(|e: Error| Failure::Other(e.to_string()))?;
    let values = values
        .split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| v.trim().parse::<f64>().map_err(|e| Failure::Other(format!("axis value {v:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepAxis::new(name, values))
}

fn gbps(bps: f64) -> String {
    format!("{:.6} Gbit/s", bps / 1e9)
}

fn print_json(value: &impl serde::Serialize) -> Result<(), Failure> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = load(cli)?;
    let mut out = io::stdout().lock();
    match &cli.command {
        Command::Analytic => {
            let m = analytic_metrics(&cfg)?;
            match cli.format {
                Format::Json => print_json(&m)?,
                Format::Csv => {
                    writeln!(out, "metric,value")?;
                    writeln!(out, "aadr_bps,{:e}", m.aadr)?;
                    writeln!(out, "abdr_bps,{:e}", m.abdr)?;
                    writeln!(out, "brep,{:e}", m.brep)?;
                    writeln!(out, "blockage_prob,{:e}", m.blockage_prob)?;
                }
                Format::Text => {
                    writeln!(out, "AADR            {}", gbps(m.aadr))?;
                    writeln!(out, "ABDR            {}", gbps(m.abdr))?;
                    writeln!(out, "BREP            {:.6}", m.brep)?;
                    writeln!(out, "blockage        {:.3e}", m.blockage_prob)?;
                    writeln!(
                        out,
                        "series terms    {} (next term {:.2e})",
                        m.diagnostics.series_terms, m.diagnostics.series_truncation_bound
                    )?;
                    writeln!(out, "config          {}", m.config_hash)?;
                }
            }
        }
        Command::Simulate {
            rounds,
            seed,
            trace,
            satellite_sampling,
            deficit,
        } => {
            let opts = SimulationOptions {
                rounds: *rounds,
                seed: *seed,
                satellite_sampling: match satellite_sampling {
                    SamplingArg::FullBpp => SatelliteSampling::FullBpp,
                    SamplingArg::ContactAngle => SatelliteSampling::ContactAngle,
                },
                deficit: match deficit {
                    DeficitArg::AtCap => FsoDeficit::AtCap,
                    DeficitArg::AtZero => FsoDeficit::AtZero,
                },
                parallel: true,
            };
            let estimate = match trace {
                Some(path) => {
                    if opts.rounds < sagin_relay::montecarlo::MIN_ROUNDS {
                        return Err(estimate_metrics(&cfg, &opts).unwrap_err().into());
                    }
                    let outcomes = simulate(&cfg, &opts)?;
                    export_trace(&outcomes, path)?;
                    summarize(&outcomes, opts.seed, cfg.config_hash())
                }
                None => estimate_metrics(&cfg, &opts)?,
            };
            match cli.format {
                Format::Json => print_json(&estimate)?,
                Format::Csv => {
                    writeln!(out, "metric,mean,half_width")?;
                    for (name, e) in [
                        ("aadr_exact_bps", estimate.aadr_exact),
                        ("aadr_linear_bps", estimate.aadr_linear),
                        ("abdr_bps", estimate.abdr),
                        ("brep", estimate.brep),
                    ] {
                        writeln!(out, "{name},{:e},{:e}", e.mean, e.half_width)?;
                    }
                }
                Format::Text => {
                    writeln!(out, "AADR (exact)    {} ± {}", gbps(estimate.aadr_exact.mean), gbps(estimate.aadr_exact.half_width))?;
                    writeln!(out, "AADR (linear)   {} ± {}", gbps(estimate.aadr_linear.mean), gbps(estimate.aadr_linear.half_width))?;
                    writeln!(out, "ABDR            {} ± {}", gbps(estimate.abdr.mean), gbps(estimate.abdr.half_width))?;
                    writeln!(out, "BREP            {:.4} ± {:.4}", estimate.brep.mean, estimate.brep.half_width)?;
                    writeln!(out, "blocked rounds  {:.4}", estimate.blockage_frequency)?;
                    writeln!(out, "mean users      {:.1}", estimate.mean_user_count)?;
                    writeln!(out, "rounds {}  seed {}", estimate.rounds, estimate.seed)?;
                }
            }
        }
        Command::Validate { rounds, seed } => {
            let report = validate(&cfg, *rounds, *seed)?;
            match cli.format {
                Format::Json => print_json(&report)?,
                Format::Csv => {
                    writeln!(out, "metric,analytic,simulated,half_width,abs_gap,rel_gap,tolerance,pass")?;
                    for r in &report.rows {
                        writeln!(
                            out,
                            "{},{:e},{:e},{:e},{:e},{},{},{}",
                            r.metric,
                            r.analytic,
                            r.simulated,
                            r.half_width,
                            r.abs_gap,
                            r.rel_gap.map(|g| format!("{g:e}")).unwrap_or_default(),
                            r.tolerance,
                            r.pass
                        )?;
                    }
                }
                Format::Text => write!(out, "{}", report.to_text())?,
            }
            if !report.pass {
                let failed: Vec<_> = report.rows.iter().filter(|r| !r.pass).map(|r| r.metric.as_str()).collect();
                return Err(Failure::Validation(format!("outside tolerance: {}", failed.join(", "))));
            }
        }
        Command::PlanPower {
            target_kind,
            target,
            power_cap_dbw,
            mc_check,
        } => {
            let opts = PlannerOptions {
                cap_dbw: *power_cap_dbw,
                ..PlannerOptions::default()
            };
            let kind = TargetKind::from(*target_kind);
            let plan = min_power(&cfg, kind, *target, &opts)?;
            let check = match mc_check {
                Some(rounds) => {
                    let at = cfg.clone().with_hap_tx_power(plan.min_power_w);
                    let e = estimate_metrics(
                        &at,
                        &SimulationOptions {
                            rounds: *rounds,
                            ..SimulationOptions::default()
                        },
                    )?;
                    Some(match kind {
                        TargetKind::Brep => e.brep,
                        TargetKind::AbdrRatio => {
                            let aadr = analytic_metrics(&at)?.aadr;
                            sagin_relay::montecarlo::Estimate {
                                mean: e.abdr.mean / aadr,
                                half_width: e.abdr.half_width / aadr,
                            }
                        }
                    })
                }
                None => None,
            };
            match cli.format {
                Format::Json => print_json(&serde_json::json!({ "plan": plan, "mc_check": check }))?,
                Format::Csv => {
                    writeln!(out, "target_kind,target,min_power_w,min_power_dbw,iterations,achieved_metric")?;
                    writeln!(
                        out,
                        "{},{},{:e},{:.2},{},{:e}",
                        serde_json::to_value(plan.target_kind)?.as_str().unwrap_or_default(),
                        plan.target_value,
                        plan.min_power_w,
                        plan.min_power_dbw,
                        plan.iterations,
                        plan.achieved_metric
                    )?;
                }
                Format::Text => {
                    writeln!(out, "minimum power   {:.2} dBW ({:.6e} W)", plan.min_power_dbw, plan.min_power_w)?;
                    writeln!(out, "achieved        {:.6}", plan.achieved_metric)?;
                    writeln!(out, "iterations      {}", plan.iterations)?;
                    if let Some(c) = check {
                        writeln!(out, "simulated       {:.6} ± {:.6}", c.mean, c.half_width)?;
                    }
                }
            }
        }
        Command::Sweep {
            axis1,
            axis2,
            metric,
            target_kind,
            target,
            output,
        } => {
            let quantity = match (metric, target_kind, target) {
                (Some(m), _, _) => SweepQuantity::Metric(match m {
                    MetricArg::Aadr => MetricKind::Aadr,
                    MetricArg::Abdr => MetricKind::Abdr,
                    MetricArg::Brep => MetricKind::Brep,
                }),
                (None, Some(k), Some(t)) => SweepQuantity::MinPower {
                    kind: (*k).into(),
                    target: *t,
                },
                _ => return Err(Failure::Other("give --metric or --target-kind with --target".into())),
            };
            let grid = sweep(
                &cfg,
                parse_axis(axis1)?,
                parse_axis(axis2)?,
                quantity,
                &PlannerOptions::default(),
            )?;
            if let Some(path) = output {
                grid.write_csv(File::create(path)?)?;
            }
            match cli.format {
                Format::Json => print_json(&grid)?,
                Format::Csv | Format::Text => {
                    if output.is_none() {
                        grid.write_csv(&mut out)?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let (code, kind, msg) = match failure {
                Failure::Config(m) => (EXIT_CONFIG, "config error", m),
                Failure::Infeasible(m) => (EXIT_INFEASIBLE, "infeasible", m),
                Failure::Validation(m) => (EXIT_VALIDATION, "validation failed", m),
                Failure::Other(m) => (EXIT_FAILURE, "error", m),
            };
            eprintln!("sagin-relay: {kind}: {msg}");
            ExitCode::from(code)
        }
    }
}
