//! Running a configured scenario and writing its artifacts: the config echo,
//! the diagnostics CSV, a binary state dump and a JSON summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::config::{RunConfig, ScenarioKind, Scheme};
use crate::diagnostics::{eoc, rms_error, DiagnosticSeries};
use crate::error::{ConfigError, Result};
use crate::scenarios::{build, Problem, Setup};
use crate::semidiscretization::SemiDiscretization;
use crate::state::ConservedState;
use crate::time_integration::{run_with, RunOutcome};

pub const CONFIG_FILE: &str = "config.txt";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const STATE_FILE: &str = "state.bin";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelSummary {
    pub initial: f64,
    #[serde(rename = "final")]
    pub last: f64,
    /// Largest `|Q(t) / Q(0) - 1|` over the records.
    pub max_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub formulation: String,
    pub volume_flux: String,
    pub density_mean: String,
    pub dissipation: String,
    pub gravity: String,
    pub scheme: String,
    pub degree: Option<usize>,
    pub cells: Vec<usize>,
    pub points: usize,
    pub steps: usize,
    pub final_time: f64,
    pub wall_seconds: f64,
    pub threads: usize,
    pub channels: BTreeMap<String, ChannelSummary>,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Result of [`simulate`]: the outcome of the time loop and its summary.
pub struct Simulation<const D: usize> {
    pub outcome: RunOutcome<D>,
    pub summary: RunSummary,
    pub coordinates: Vec<[f64; D]>,
}

pub enum AnySimulation {
    One(Simulation<1>),
    Two(Simulation<2>),
    Three(Simulation<3>),
}

impl AnySimulation {
    pub fn summary(&self) -> &RunSummary {
        match self {
            AnySimulation::One(s) => &s.summary,
            AnySimulation::Two(s) => &s.summary,
            AnySimulation::Three(s) => &s.summary,
        }
    }

    pub fn series(&self) -> &DiagnosticSeries {
        match self {
            AnySimulation::One(s) => &s.outcome.series,
            AnySimulation::Two(s) => &s.outcome.series,
            AnySimulation::Three(s) => &s.outcome.series,
        }
    }
}

fn simulate_setup<const D: usize>(config: &RunConfig, setup: Setup<D>) -> Result<Simulation<D>> {
    let semi = setup.semi.as_ref();
    let reference = setup.reference.clone();
    let start = Instant::now();
    let outcome = run_with(semi, setup.initial, &config.time_loop(), |t, u| {
        let speed = u.iter().map(|s| crate::state::norm(&s.velocity())).fold(0.0, f64::max);
        let mut out = vec![("max_speed".to_string(), speed)];
        if let Some(r) = &reference {
            let velocity = rms_error::<D, D, _, _, _>(semi, u, |_, s| s.velocity(), |x| r(x, t).velocity);
            let velocity_error = velocity.iter().map(|e| e * e).sum::<f64>().sqrt();
            let [density] = rms_error(semi, u, |_, s| [s.rho], |x| [r(x, t).rho]);
            out.push(("velocity_rms_error".into(), velocity_error));
            out.push(("density_rms_error".into(), density));
        }
        out
    })?;
    let wall_seconds = start.elapsed().as_secs_f64();
    let summary = summarize(config, semi, &outcome, wall_seconds);
    Ok(Simulation { outcome, summary, coordinates: semi.coordinates().to_vec() })
}

fn summarize<const D: usize>(
    config: &RunConfig,
    semi: &dyn SemiDiscretization<D>,
    outcome: &RunOutcome<D>,
    wall_seconds: f64,
) -> RunSummary {
    let series = &outcome.series;
    let channels = series
        .names()
        .iter()
        .map(|name| {
            let values = series.channel(name).expect("listed channel");
            let summary = ChannelSummary {
                initial: values[0],
                last: *values.last().expect("at least one record"),
                max_drift: series.max_normalized_drift(name).unwrap_or(f64::NAN),
            };
            (name.clone(), summary)
        })
        .collect();
    RunSummary {
        scenario: config.scenario.name().into(),
        formulation: config.formulation.name().into(),
        volume_flux: config.flux.volume.name().into(),
        density_mean: config.flux.density_mean.name().into(),
        dissipation: config.flux.dissipation.name().into(),
        gravity: config.gravity.name().into(),
        scheme: config.scheme.name().into(),
        degree: (config.scheme == Scheme::Dgsem).then_some(config.degree),
        cells: config.cells.clone(),
        points: semi.len(),
        steps: outcome.steps,
        final_time: outcome.time,
        wall_seconds,
        threads: rayon::current_num_threads(),
        channels,
    }
}

/// Builds and runs the configured scenario without writing anything.
pub fn simulate(config: &RunConfig) -> Result<AnySimulation> {
    Ok(match build(config)? {
        Problem::One(s) => AnySimulation::One(simulate_setup(config, s)?),
        Problem::Two(s) => AnySimulation::Two(simulate_setup(config, s)?),
        Problem::Three(s) => AnySimulation::Three(simulate_setup(config, s)?),
    })
}

/// Runs the configured scenario and writes all artifacts into `out_dir`.
pub fn execute(config: &RunConfig, out_dir: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join(CONFIG_FILE), config.to_text())?;
    let simulation = simulate(config)?;
    simulation.series().write_csv(&out_dir.join(DIAGNOSTICS_FILE))?;
    let state_path = out_dir.join(STATE_FILE);
    let formulation = config.formulation.name();
    match &simulation {
        AnySimulation::One(s) => write_state(&state_path, &s.outcome, &s.coordinates, formulation)?,
        AnySimulation::Two(s) => write_state(&state_path, &s.outcome, &s.coordinates, formulation)?,
        AnySimulation::Three(s) => write_state(&state_path, &s.outcome, &s.coordinates, formulation)?,
    }
    let summary = simulation.summary().clone();
    std::fs::write(out_dir.join(SUMMARY_FILE), summary.to_json())?;
    Ok(summary)
}

/// Text header terminated by an `end_header` line, then for every point its
/// `D` coordinates followed by the conserved variables, as little-endian f64.
pub fn write_state<const D: usize>(
    path: &Path,
    outcome: &RunOutcome<D>,
    coordinates: &[[f64; D]],
    formulation: &str,
) -> std::io::Result<()> {
    let closure = if formulation == "theta" { "rho_theta" } else { "rho_e" };
    let mut columns: Vec<String> = ["x", "y", "z"][..D].iter().map(|s| s.to_string()).collect();
    columns.push("rho".into());
    columns.extend((1..=D).map(|d| format!("rho_v{d}")));
    columns.push(closure.into());
    let mut header = String::new();
    let _ = writeln!(header, "thetaflux state");
    let _ = writeln!(header, "dimension {D}");
    let _ = writeln!(header, "formulation {formulation}");
    let _ = writeln!(header, "time {:.17e}", outcome.time);
    let _ = writeln!(header, "points {}", outcome.state.len());
    let _ = writeln!(header, "columns {}", columns.join(" "));
    let _ = writeln!(header, "encoding f64 little-endian, point-major");
    let _ = writeln!(header, "end_header");

    let mut bytes = header.into_bytes();
    for (x, s) in coordinates.iter().zip(&outcome.state) {
        for v in x.iter().copied().chain(s.iter()) {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&bytes)
}

/// Parses a dump written by [`write_state`] into its header lines and the
/// row-major values.
pub fn read_state(path: &Path) -> std::io::Result<(Vec<String>, Vec<f64>)> {
    let bytes = std::fs::read(path)?;
    let marker = b"end_header\n";
    let end = bytes
        .windows(marker.len())
        .position(|w| w == marker)
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidData, "missing end_header"))?;
    let header = String::from_utf8_lossy(&bytes[..end]).lines().map(str::to_string).collect();
    let body = &bytes[end + marker.len()..];
    if body.len() % 8 != 0 {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "truncated payload"));
    }
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok((header, values))
}

/// `ConservedState` values of a dump, dropping the coordinates.
pub fn states_from_dump<const D: usize>(values: &[f64]) -> Vec<ConservedState<D>> {
    values.chunks_exact(2 * D + 2).map(|row| ConservedState::from_slice(&row[D..])).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceLevel {
    pub cells: usize,
    pub h: f64,
    pub density_rms_error: f64,
    /// Observed order against the previous level.
    pub eoc: Option<f64>,
}

/// Runs `levels` refinements of a scenario with an exact solution, doubling
/// the cell count of `base` each time, and reports the final density error.
pub fn convergence(base: &RunConfig, levels: usize) -> Result<Vec<ConvergenceLevel>> {
    if base.scenario != ScenarioKind::DensityWave {
        return Err(ConfigError::Inconsistent(format!(
            "convergence needs an exact solution; `{}` has none",
            base.scenario.name()
        ))
        .into());
    }
    if levels < 2 {
        return Err(ConfigError::InvalidValue { key: "levels".into(), message: "need at least two levels".into() }.into());
    }
    let mut hs = Vec::with_capacity(levels);
    let mut errors = Vec::with_capacity(levels);
    let mut cells = Vec::with_capacity(levels);
    for level in 0..levels {
        let mut config = base.clone();
        config.cells = base.cells.iter().map(|n| n << level).collect();
        config.diagnostics_every = 0;
        let simulation = simulate(&config)?;
        let error = simulation.series().channel("density_rms_error").and_then(|c| c.last().copied()).expect("reference channel");
        cells.push(config.cells[0]);
        hs.push(1.0 / config.cells[0] as f64);
        errors.push(error);
    }
    let orders = eoc(&hs, &errors);
    Ok((0..levels)
        .map(|k| ConvergenceLevel {
            cells: cells[k],
            h: hs[k],
            density_rms_error: errors[k],
            eoc: if k == 0 { None } else { orders[k - 1] },
        })
        .collect())
}
