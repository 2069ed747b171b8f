use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tmprl_core::harness::{
    default_schedule, run_comparison, run_transfer, validate_setup, ExperimentSpec, Setup,
    SetupPaths, Span, DEFAULT_EPISODES, DEFAULT_RUNS, DEFAULT_SCENARIO, DEFAULT_TRANSFER_RUNS,
    DEFAULT_TRANSFER_SPAN,
};
use tmprl_core::planning_loops::{LoopConfig, Mode};

#[derive(Parser)]
#[command(
    name = "tmprl",
    version,
    about = "Task-motion planning with learning from execution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare tmp, tp-rl and tmp-rl on one scenario.
    Run(RunArgs),
    /// Learn three start scenarios in sequence, with and without carrying tables over.
    Transfer(TransferArgs),
    /// Parse and ground the inputs and run one noise-free episode per mode.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Action description; defaults to the bundled office domain.
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Occupancy map; defaults to the bundled office map.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Simulator configuration; defaults to the bundled one.
    #[arg(long)]
    env: Option<PathBuf>,
}

impl InputArgs {
    fn paths(&self) -> SetupPaths {
        SetupPaths {
            domain: self.domain.clone(),
            map: self.map.clone(),
            env: self.env.clone(),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// tmp, tp-rl, tmp-rl or all.
    #[arg(long, default_value = "all")]
    mode: String,
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,
    #[arg(long, default_value_t = DEFAULT_EPISODES)]
    episodes: u64,
    /// Base seed; run r uses seed ^ r. Defaults to the env config's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    inputs: InputArgs,
    /// Bundled start scenario.
    #[arg(long, default_value = DEFAULT_SCENARIO, conflicts_with = "problem")]
    scenario: String,
    /// Problem file with `init` and `goal` statements.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Probability of an exploratory episode.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Record solver wall time in episodes.csv (makes output run-dependent).
    #[arg(long)]
    wall_clock: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TransferArgs {
    #[arg(long, default_value_t = DEFAULT_TRANSFER_RUNS)]
    runs: usize,
    /// Episodes per scenario.
    #[arg(long, default_value_t = DEFAULT_TRANSFER_SPAN)]
    span: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    inputs: InputArgs,
    #[arg(long)]
    wall_clock: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    inputs: InputArgs,
    #[arg(long, default_value = DEFAULT_SCENARIO, conflicts_with = "problem")]
    scenario: String,
    #[arg(long)]
    problem: Option<PathBuf>,
}

fn parse_modes(s: &str) -> Result<Vec<Mode>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Mode::ALL.to_vec());
    }
    s.split(',')
        .map(|m| m.trim().parse::<Mode>().map_err(anyhow::Error::msg))
        .collect()
}

fn load(inputs: &InputArgs) -> Result<Setup> {
    Setup::load(&inputs.paths()).context("loading inputs")
}

fn run(args: RunArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.epsilon) {
        bail!("--epsilon must be in [0, 1]");
    }
    let modes = parse_modes(&args.mode)?;
    let setup = load(&args.inputs)?;
    let (problem, scenario) = match &args.problem {
        Some(p) => (setup.problem_file(p)?, p.display().to_string()),
        None => (setup.scenario(&args.scenario)?, args.scenario.clone()),
    };
    let spec = ExperimentSpec {
        modes,
        runs: args.runs,
        episodes: args.episodes,
        seed: args.seed.unwrap_or(setup.env.rng_seed),
        loop_cfg: LoopConfig {
            epsilon: args.epsilon,
            ..LoopConfig::default()
        },
        wall_clock: args.wall_clock,
    };
    let rows = run_comparison(&setup, &problem, &scenario, &spec, &args.out)?;
    report_written(&args.out, rows.len());
    Ok(())
}

fn transfer(args: TransferArgs) -> Result<()> {
    let setup = load(&args.inputs)?;
    let schedule: Vec<Span> = default_schedule()
        .into_iter()
        .map(|s| Span {
            episodes: args.span,
            ..s
        })
        .collect();
    let seed = args.seed.unwrap_or(setup.env.rng_seed);
    let rows = run_transfer(
        &setup,
        &schedule,
        args.runs,
        seed,
        &LoopConfig::default(),
        &args.out,
        args.wall_clock,
    )?;
    report_written(&args.out, rows.len());
    Ok(())
}

fn report_written(out: &Path, episodes: usize) {
    println!("{episodes} episodes written to {}", out.display());
}

fn validate(args: ValidateArgs) -> Result<bool> {
    let report = validate_setup(
        &args.inputs.paths(),
        args.problem.as_deref(),
        &args.scenario,
    );
    for line in &report.lines {
        println!("{line}");
    }
    for e in &report.errors {
        eprintln!("error: {e}");
    }
    Ok(report.ok())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a).map(|_| true),
        Command::Transfer(a) => transfer(a).map(|_| true),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
