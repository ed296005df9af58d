use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thicken_core::bench::{bench, write_bench_csv};
use thicken_core::probe::ProbeError;
use thicken_core::scenario::{preset, PRESETS};
use thicken_core::{parse_scenario, probe, run, ProbeConfig, RunError, RunOptions, Scenario, VelocityProgram};

#[derive(Parser)]
#[command(name = "thicken", version, about = "Particle simulator for shear-thickening fluids")]
struct Cli {
    /// Worker threads for the parallel phases (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write frame and metrics CSV files.
    Run(RunArgs),
    /// Stiffness response of a single spring to a velocity program.
    Probe(ProbeArgs),
    /// Per-step cost as a function of the history window.
    Bench(BenchArgs),
    /// Check a scenario file and report the resolved configuration.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file; an empty file gives the default block drop.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: block_drop, bowling_ball, vibration or long_memory.
    #[arg(long)]
    preset: Option<String>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the number of steps.
    #[arg(long)]
    steps: Option<u64>,
    /// Write zeros in the timing columns so reruns are byte-identical.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    /// Comma-separated window lengths, one output column each.
    #[arg(long, value_delimiter = ',', default_value = "100")]
    windows: Vec<usize>,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 1.0)]
    k_min: f64,
    #[arg(long, default_value_t = 10.0)]
    k_hist: f64,
    #[arg(long, default_value_t = 300)]
    steps: u64,
    /// zero, impulse:MAG,STEP or step:MAG,START,STOP
    #[arg(long, default_value = "step:1,0,1000000")]
    program: String,
    /// CSV destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_delimiter = ',', default_value = "0,50,100,500")]
    windows: Vec<usize>,
    /// Measured steps per window.
    #[arg(long, default_value_t = 50)]
    steps: u64,
    /// CSV destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Print the scenario with every default filled in.
    #[arg(long)]
    print: bool,
}

enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(_) => Failure::Config(e.to_string()),
            RunError::Numerical(_) => Failure::Numerical(e.to_string()),
            RunError::Io { .. } => Failure::Io(e.to_string()),
        }
    }
}

fn io_failure(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn load(args: &ScenarioArgs) -> Result<Scenario, Failure> {
    let mut scenario = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(io_failure(path))?;
            parse_scenario(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        (None, Some(name)) => preset(name).map_err(|e| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            Failure::Config(format!("{e}; available: {}", names.join(", ")))
        })?,
        (None, None) => return Err(Failure::Config("either --config or --preset is required".into())),
    };
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    Ok(scenario)
}

fn with_output(out: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(io_failure(path))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(io_failure(path))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run(args) => {
            let mut scenario = load(&args.scenario)?;
            if let Some(steps) = args.steps {
                scenario.steps = steps;
            }
            let options = RunOptions {
                record_timings: !args.no_timings,
            };
            let summary = run(&scenario, &args.out, options)?;
            println!(
                "{}: {} steps, {} particles, {} frames written to {}",
                scenario.name,
                summary.steps,
                summary.particles,
                summary.frames,
                args.out.display()
            );
            Ok(())
        }
        Command::Probe(args) => {
            let program = VelocityProgram::parse(&args.program).map_err(|e| Failure::Config(e.to_string()))?;
            let config = ProbeConfig {
                q: args.q,
                windows: args.windows,
                dt: args.dt,
                k_min: args.k_min,
                k_hist: args.k_hist,
                steps: args.steps,
                program,
            };
            let table = probe(&config).map_err(|e: ProbeError| Failure::Config(e.to_string()))?;
            with_output(args.out.as_deref(), |w| table.write_csv(w))
        }
        Command::Bench(args) => {
            let scenario = load(&args.scenario)?;
            let rows = bench(&scenario, &args.windows, args.steps)?;
            with_output(args.out.as_deref(), |w| write_bench_csv(&rows, w))
        }
        Command::Validate(args) => {
            let scenario = load(&args.scenario)?;
            scenario.validate().map_err(|e| Failure::Config(e.to_string()))?;
            if args.print {
                print!("{}", scenario.serialize());
            } else {
                println!(
                    "ok: {} ({}D, {} steps, dt = {}, window = {} steps)",
                    scenario.name,
                    scenario.dimension,
                    scenario.steps,
                    scenario.dt,
                    scenario.history_window()
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(cli.command)),
            Err(e) => Err(Failure::Config(format!("--threads {n}: {e}"))),
        },
        None => execute(cli.command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
