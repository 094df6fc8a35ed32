use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::json;
use thetaflux::config::{RunConfig, ScenarioKind, Scheme};
use thetaflux::fluxes::Dissipation;
use thetaflux::output::{convergence, execute};
use thetaflux::time_integration::StepControl;
use thetaflux::verify::{run_all, run_suite, Suite, VerifyOptions};
use thetaflux::Error;

/// Overrides the worker thread count of the right-hand side evaluation.
const THREADS_VAR: &str = "THETAFLUX_THREADS";

#[derive(Parser)]
#[command(name = "thetaflux", version, about = "Structure-preserving Euler solver with gravity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured scenario and write its artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `run.output_dir` of the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the property suites and print a JSON report.
    Verify {
        /// One of means, tadmor, sbp, metric, freestream, pep, positivity, balance.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Flip the sign of the gravity jump factor (mutation check).
        #[arg(long, hide = true)]
        inject_flipped_jump: bool,
    },
    /// Observed convergence orders of the DGSEM under mesh refinement.
    Convergence {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        /// Elements on the coarsest level.
        #[arg(long, default_value_t = 8)]
        cells: usize,
        #[arg(long, default_value_t = 1.0)]
        end_time: f64,
        #[arg(long, default_value_t = 0.05)]
        cfl: f64,
    },
}

enum Failure {
    Config(anyhow::Error),
    Run(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Mesh(_) => Failure::Config(e.into()),
            _ => Failure::Run(e.into()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::Config(anyhow::anyhow!("{THREADS_VAR} must be a thread count, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Run(e.into()))
}

fn run(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>) -> Result<bool, Failure> {
    let text = std::fs::read_to_string(&config)
        .with_context(|| format!("reading {}", config.display()))
        .map_err(Failure::Config)?;
    let mut config = RunConfig::parse(&text).map_err(Error::from)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let out = out.unwrap_or_else(|| config.output_dir.clone());
    let summary = execute(&config, &out)?;
    println!("{}", summary.to_json());
    Ok(true)
}

fn verify(suite: Option<String>, seed: Option<u64>, flipped: bool) -> Result<bool, Failure> {
    let mut options = VerifyOptions { flip_gravity_jump: flipped, ..VerifyOptions::default() };
    if let Some(seed) = seed {
        options.seed = seed;
    }
    let reports = match suite {
        Some(name) => {
            let suite = Suite::from_name(&name).ok_or_else(|| {
                let known: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                Failure::Config(anyhow::anyhow!("unknown suite `{name}`; expected one of {}", known.join(", ")))
            })?;
            vec![run_suite(suite, &options)]
        }
        None => run_all(&options),
    };
    let passed = reports.iter().all(|r| r.passed);
    let report = json!({ "passed": passed, "seed": options.seed, "suites": reports });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(passed)
}

fn convergence_table(
    scenario: &str,
    levels: usize,
    degree: usize,
    cells: usize,
    end_time: f64,
    cfl: f64,
) -> Result<bool, Failure> {
    let kind = ScenarioKind::from_name(scenario)
        .ok_or_else(|| Failure::Config(anyhow::anyhow!("unknown scenario `{scenario}`")))?;
    let mut base = RunConfig::defaults(kind);
    base.scheme = Scheme::Dgsem;
    base.degree = degree;
    base.flux = base.flux.with_dissipation(Dissipation::Rusanov);
    base.cells = vec![cells; kind.dimension()];
    base.end_time = end_time;
    base.step = StepControl::Cfl(cfl);
    let rows = convergence(&base, levels)?;
    let report = json!({ "scenario": kind.name(), "degree": degree, "levels": rows });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Run { config, out, seed } => run(config, out, seed),
        Command::Verify { suite, seed, inject_flipped_jump } => verify(suite, seed, inject_flipped_jump),
        Command::Convergence { scenario, levels, degree, cells, end_time, cfl } => {
            convergence_table(&scenario, levels, degree, cells, end_time, cfl)
        }
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
