//! Command-line front end.
//!
//! Exit codes: 0 success, 1 config/usage error, 2 solver non-convergence,
//! 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use masknet::experiment::{
    run_experiment, simulate_point, solve_point, validate_config_with_kind, ExperimentError,
    ExperimentSpec,
};

#[derive(Parser)]
#[command(name = "masknet", version, about = "Epidemic spread with mask-wearing on random contact networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML config file; defaults apply for anything omitted.
    #[arg(long, value_name = "path")]
    config: Option<PathBuf>,
    /// Override sim.master_seed.
    #[arg(long, value_name = "u64")]
    seed: Option<u64>,
    /// Override output.path (CSV or report destination).
    #[arg(long, value_name = "path")]
    out: Option<PathBuf>,
    /// Rayon worker threads (default: all cores).
    #[arg(long, value_name = "count")]
    workers: Option<usize>,
    /// Erase self-loops and parallel edges from generated networks.
    #[arg(long)]
    simple_graph: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic quantities at the config's base parameter point.
    Solve(Common),
    /// One Monte Carlo ensemble at the base point; per-trial CSV to --out.
    Simulate(Common),
    /// Run the sweep experiment named by experiment.kind in the config.
    Sweep(Common),
    /// Critical mean degree vs mask fraction (forces kind = threshold).
    Threshold(Common),
    /// Mask model vs two-strain mutation analogue (forces kind = mutation_compare).
    CompareMutation(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Solve(c)
            | Command::Simulate(c)
            | Command::Sweep(c)
            | Command::Threshold(c)
            | Command::CompareMutation(c) => c,
        }
    }

    fn forced_kind(&self) -> Option<&'static str> {
        match self {
            Command::Threshold(_) => Some("threshold"),
            Command::CompareMutation(_) => Some("mutation_compare"),
            _ => None,
        }
    }
}

fn load_spec(common: &Common, forced_kind: Option<&str>) -> Result<ExperimentSpec, ExperimentError> {
    let raw = match &common.config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    let mut spec =
        validate_config_with_kind(&raw, forced_kind).map_err(ExperimentError::Config)?;
    if let Some(seed) = common.seed {
        spec.sim.master_seed = seed;
    }
    if let Some(out) = &common.out {
        spec.output_path = Some(out.clone());
    }
    if common.simple_graph {
        spec.sim.simple_graph = true;
    }
    Ok(spec)
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    let common = cli.command.common();
    if let Some(workers) = common.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| ExperimentError::Config(vec![format!("--workers: {e}")]))?;
    }
    let spec = load_spec(common, cli.command.forced_kind())?;
    match cli.command {
        Command::Solve(_) => with_output(&spec, |spec, out| solve_point(spec, out)),
        Command::Simulate(_) => {
            let stdout = std::io::stdout();
            simulate_point(&spec, &mut stdout.lock())
        }
        Command::Sweep(_) | Command::Threshold(_) | Command::CompareMutation(_) => {
            run_experiment(&spec)
        }
    }
}

/// `solve` honours --out like the sweeps do; everything else in the spec's
/// output path handling lives in [`experiment::run_experiment`].
fn with_output(
    spec: &ExperimentSpec,
    body: impl Fn(&ExperimentSpec, &mut dyn std::io::Write) -> Result<(), ExperimentError>,
) -> Result<(), ExperimentError> {
    match &spec.output_path {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            let mut w = std::io::BufWriter::new(file);
            body(spec, &mut w)?;
            use std::io::Write;
            w.flush()?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            body(spec, &mut stdout.lock())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
