mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use stp_core::scenario::{Scenario, StSelection};
use stp_core::sim::{SimOptions, Simulation};
use stp_core::Error;

#[derive(Parser)]
#[command(
    name = "stp",
    about = "Spatial trajectory planner: scenario simulation, profile snapshots, runtime benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario closed-loop and write cycles/profiles/timings/report.
    Run(RunArgs),
    /// Run one planning cycle at a given simulated time and dump its profiles.
    Profile(ProfileArgs),
    /// Measure per-cycle runtimes over a fixed number of cycles.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    scenario: PathBuf,
    /// Output directory (also via STP_OUT; default ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Simulated duration in seconds.
    #[arg(long, default_value_t = 20.0)]
    duration: f64,
    /// Override the reference-noise seed of the scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Which scenario spatiotemporal constraints to apply.
    #[arg(long, default_value = "all", value_parser = parse_selection)]
    constraint_set: StSelection,
    /// Reinitialize the solvers every cycle instead of warm starting.
    #[arg(long)]
    cold_start: bool,
    /// Wall-clock planning budget per cycle in milliseconds; when exceeded
    /// the previous solution stays in force. Disabled by default to keep
    /// runs deterministic.
    #[arg(long)]
    budget_ms: Option<f64>,
    /// Record a profile snapshot every N cycles.
    #[arg(long, default_value_t = 10)]
    profile_stride: u64,
}

#[derive(Args)]
struct ProfileArgs {
    /// Scenario file (JSON).
    scenario: PathBuf,
    /// Simulated time at which to snapshot the planning cycle.
    #[arg(long, default_value_t = 0.0)]
    at_time: f64,
    /// Output directory (also via STP_OUT; default ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which scenario spatiotemporal constraints to apply.
    #[arg(long, default_value = "all", value_parser = parse_selection)]
    constraint_set: StSelection,
    /// Override the reference-noise seed of the scenario.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Scenario file (JSON).
    scenario: PathBuf,
    /// Number of planning cycles to measure (at least 100).
    #[arg(long, default_value_t = 500)]
    cycles: u64,
    /// Which scenario spatiotemporal constraints to apply.
    #[arg(long, default_value = "all", value_parser = parse_selection)]
    constraint_set: StSelection,
}

fn parse_selection(s: &str) -> Result<StSelection, String> {
    s.parse()
}

fn load_scenario(path: &PathBuf) -> Result<Scenario, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return Err(ExitCode::from(1));
        }
    };
    match Scenario::from_json(&text) {
        Ok(s) => Ok(s),
        Err(Error::ScenarioParse {
            line,
            column,
            message,
        }) => {
            eprintln!("error: {}:{line}:{column}: {message}", path.display());
            Err(ExitCode::from(1))
        }
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            Err(ExitCode::from(1))
        }
    }
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("STP_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let scenario = match load_scenario(&args.scenario) {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let options = SimOptions {
        duration: args.duration,
        seed: args.seed,
        selection: args.constraint_set,
        cold_start: args.cold_start,
        budget_ms: args.budget_ms,
        profile_stride: args.profile_stride.max(1),
    };
    let sim = Simulation::new(scenario, options).context("building simulation")?;
    let outcome = sim.run();

    let dir = out_dir(args.out);
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let paths = output::write_run(&dir, &outcome)?;

    let v = &outcome.verdict;
    println!("completed {:.2} s simulated", v.completed_time);
    match &v.collision {
        Some(c) => println!(
            "collision: with actor {} at t = {:.2} s (distance {:.2} m)",
            c.actor, c.time, c.distance
        ),
        None => println!("collision: none"),
    }
    for a in &v.arrivals {
        let arrival = a
            .arrival
            .map(|t| format!("{t:.2} s"))
            .unwrap_or_else(|| "never".into());
        println!(
            "t_{}({:.1} m) bound {:.2} s: arrival {} -> {}",
            match a.kind {
                stp_core::scenario::StKindConfig::Min => "min",
                stp_core::scenario::StKindConfig::Max => "max",
            },
            a.s,
            a.bound,
            arrival,
            if a.satisfied { "ok" } else { "violated" }
        );
    }
    println!(
        "accel range [{:.2}, {:.2}] m/s^2, v_max {:.2} m/s, plan failures {}",
        v.accel_cmd_min, v.accel_cmd_max, v.v_max, v.plan_failures
    );
    println!("{}", outcome.timing_stats.table());
    for p in paths {
        println!("wrote {}", p.display());
    }

    Ok(if v.collision.is_some() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_profile(args: ProfileArgs) -> Result<ExitCode> {
    let scenario = match load_scenario(&args.scenario) {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    if args.at_time < 0.0 {
        bail!("--at-time must be non-negative");
    }
    let options = SimOptions {
        duration: args.at_time + 0.02,
        seed: args.seed,
        selection: args.constraint_set,
        ..SimOptions::default()
    };
    let mut sim = Simulation::new(scenario, options).context("building simulation")?;
    while sim.time() < args.at_time - 1e-9 {
        sim.step();
    }
    sim.step();
    let plan = sim
        .current_plan()
        .context("no plan produced at the requested time (scenario ended early?)")?;

    let dir = out_dir(args.out);
    std::fs::create_dir_all(&dir)?;
    let paths = output::write_profile(&dir, plan)?;
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    if args.cycles < 100 {
        bail!("--cycles must be at least 100");
    }
    let scenario = match load_scenario(&args.scenario) {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    let options = SimOptions {
        duration: args.cycles as f64 * 0.01 + 0.005,
        selection: args.constraint_set,
        ..SimOptions::default()
    };
    let sim = Simulation::new(scenario, options).context("building simulation")?;
    let outcome = sim.run();
    print!("{}", outcome.timing_stats.table());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Profile(args) => cmd_profile(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
