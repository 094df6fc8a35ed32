//! Run configuration: a flat `key = value` text format with `[section]`
//! headers.
//!
//! ```text
//! [run]
//! scenario = well_balanced
//! end_time = 100.0
//! dt = 0.01
//!
//! [physics]
//! formulation = theta
//! background = isothermal
//!
//! [flux]
//! volume = etec
//! gravity = noncons_log
//!
//! [mesh]
//! scheme = dgsem
//! degree = 2
//! cells = 16 16
//! geometry = warped
//! ```
//!
//! Omitted keys take scenario defaults, unknown or repeated keys are errors
//! and [`RunConfig::to_text`] writes every key, so a written file parses back
//! to the same configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::ConfigError;
use crate::fluxes::{DensityMean, Dissipation, FluxKit, GravityMean, VolumeFlux};
use crate::state::Formulation;
use crate::time_integration::{StepControl, TimeLoopConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    DensityWave,
    TaylorGreen,
    WellBalanced,
    InertiaGravityWave,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::DensityWave,
        ScenarioKind::TaylorGreen,
        ScenarioKind::WellBalanced,
        ScenarioKind::InertiaGravityWave,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::DensityWave => "density_wave",
            ScenarioKind::TaylorGreen => "taylor_green",
            ScenarioKind::WellBalanced => "well_balanced",
            ScenarioKind::InertiaGravityWave => "inertia_gravity_wave",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn dimension(self) -> usize {
        match self {
            ScenarioKind::DensityWave => 1,
            ScenarioKind::TaylorGreen => 3,
            ScenarioKind::WellBalanced | ScenarioKind::InertiaGravityWave => 2,
        }
    }
}

/// Hydrostatic background of the gravity scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Background {
    /// Constant temperature 250 K.
    Isothermal,
    /// Constant potential temperature 300 K.
    Adiabatic,
}

impl Background {
    pub fn name(self) -> &'static str {
        match self {
            Background::Isothermal => "isothermal",
            Background::Adiabatic => "adiabatic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "isothermal" => Some(Background::Isothermal),
            "adiabatic" => Some(Background::Adiabatic),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GravitySetting {
    None,
    NonConservative(GravityMean),
    Pointwise,
}

impl GravitySetting {
    pub fn name(self) -> &'static str {
        match self {
            GravitySetting::None => "none",
            GravitySetting::NonConservative(GravityMean::Logarithmic) => "noncons_log",
            GravitySetting::NonConservative(GravityMean::Stolarsky) => "noncons_stolarsky",
            GravitySetting::NonConservative(GravityMean::Arithmetic) => "noncons_arithmetic",
            GravitySetting::Pointwise => "pointwise",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "none" => GravitySetting::None,
            "noncons_log" => GravitySetting::NonConservative(GravityMean::Logarithmic),
            "noncons_stolarsky" => GravitySetting::NonConservative(GravityMean::Stolarsky),
            "noncons_arithmetic" => GravitySetting::NonConservative(GravityMean::Arithmetic),
            "pointwise" => GravitySetting::Pointwise,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    FiniteVolume,
    Dgsem,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::FiniteVolume => "fv",
            Scheme::Dgsem => "dgsem",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "fv" => Some(Scheme::FiniteVolume),
            "dgsem" => Some(Scheme::Dgsem),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Flat,
    /// The sine-warped mapping of `[0, 1000]^2`.
    Warped,
}

impl Geometry {
    pub fn name(self) -> &'static str {
        match self {
            Geometry::Flat => "flat",
            Geometry::Warped => "warped",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "flat" => Some(Geometry::Flat),
            "warped" => Some(Geometry::Warped),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub formulation: Formulation,
    pub flux: FluxKit,
    pub gravity: GravitySetting,
    pub scheme: Scheme,
    /// Polynomial degree for the DGSEM; ignored by finite volumes.
    pub degree: usize,
    /// Cells or elements per direction.
    pub cells: Vec<usize>,
    pub geometry: Geometry,
    pub step: StepControl,
    pub end_time: f64,
    pub diagnostics_every: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub background: Background,
    /// Temperature perturbation amplitude of the gravity wave, in kelvin.
    pub temperature_perturbation: f64,
    /// Relative amplitude of seeded random density noise added to the
    /// initial field (0 disables it).
    pub noise: f64,
}

const KEYS: [&str; 19] = [
    "run.scenario",
    "run.end_time",
    "run.cfl",
    "run.dt",
    "run.diagnostics_every",
    "run.output_dir",
    "run.seed",
    "physics.formulation",
    "physics.background",
    "physics.temperature_perturbation",
    "physics.noise",
    "flux.volume",
    "flux.density_mean",
    "flux.dissipation",
    "flux.gravity",
    "mesh.scheme",
    "mesh.degree",
    "mesh.cells",
    "mesh.geometry",
];

impl RunConfig {
    /// Desk-scale defaults of a scenario.
    pub fn defaults(scenario: ScenarioKind) -> Self {
        let base = RunConfig {
            scenario,
            formulation: Formulation::Theta,
            flux: FluxKit::conservative(VolumeFlux::Tec),
            gravity: GravitySetting::None,
            scheme: Scheme::FiniteVolume,
            degree: 2,
            cells: vec![64],
            geometry: Geometry::Flat,
            step: StepControl::Cfl(0.01),
            end_time: 5.0,
            diagnostics_every: 100,
            output_dir: PathBuf::from("output").join(scenario.name()),
            seed: 0,
            background: Background::Isothermal,
            temperature_perturbation: 0.0,
            noise: 0.0,
        };
        match scenario {
            ScenarioKind::DensityWave => base,
            ScenarioKind::TaylorGreen => RunConfig { flux: FluxKit::conservative(VolumeFlux::Ec), cells: vec![16; 3], ..base },
            ScenarioKind::WellBalanced => RunConfig {
                flux: FluxKit::conservative(VolumeFlux::Etec).with_dissipation(Dissipation::Rusanov),
                gravity: GravitySetting::NonConservative(GravityMean::Logarithmic),
                scheme: Scheme::Dgsem,
                cells: vec![16, 16],
                geometry: Geometry::Warped,
                step: StepControl::Fixed(0.01),
                end_time: 100.0,
                diagnostics_every: 1000,
                ..base
            },
            ScenarioKind::InertiaGravityWave => RunConfig {
                flux: FluxKit::conservative(VolumeFlux::Etec).with_dissipation(Dissipation::Rusanov),
                gravity: GravitySetting::NonConservative(GravityMean::Logarithmic),
                scheme: Scheme::Dgsem,
                degree: 3,
                cells: vec![40, 4],
                step: StepControl::Cfl(0.1),
                end_time: 1800.0,
                diagnostics_every: 500,
                temperature_perturbation: 1e-3,
                ..base
            },
        }
    }

    pub fn time_loop(&self) -> TimeLoopConfig {
        TimeLoopConfig { end_time: self.end_time, step: self.step, diagnostics_every: self.diagnostics_every }
    }

    /// Checks cross-field consistency.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let inconsistent = |m: String| Err(ConfigError::Inconsistent(m));
        if self.flux.volume.formulation() != self.formulation {
            return inconsistent(format!(
                "volume flux `{}` is a {} flux but the formulation is `{}`",
                self.flux.volume.name(),
                self.flux.volume.formulation().name(),
                self.formulation.name()
            ));
        }
        let dim = self.scenario.dimension();
        if self.cells.len() != dim {
            return inconsistent(format!("{} is {dim}-dimensional but {} cell counts were given", self.scenario.name(), self.cells.len()));
        }
        if self.cells.contains(&0) {
            return inconsistent("cell counts must be positive".into());
        }
        if self.scheme == Scheme::Dgsem && dim > 2 {
            return inconsistent("the DGSEM is available in 1D and 2D only".into());
        }
        if self.geometry == Geometry::Warped && !(self.scenario == ScenarioKind::WellBalanced && self.scheme == Scheme::Dgsem) {
            return inconsistent("the warped geometry is defined for the DGSEM well-balanced scenario only".into());
        }
        if self.scenario == ScenarioKind::InertiaGravityWave && self.background != Background::Isothermal {
            return inconsistent("the gravity wave uses an isothermal background".into());
        }
        if !(self.noise >= 0.0 && self.noise < 1.0) {
            return Err(invalid("physics.noise", "must lie in [0, 1)"));
        }
        if !self.temperature_perturbation.is_finite() {
            return Err(invalid("physics.temperature_perturbation", "must be finite"));
        }
        self.time_loop().validate().map_err(ConfigError::Inconsistent)
    }

    /// Parses and validates a configuration file.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = parse_entries(text)?;
        let mut take = |key: &str| entries.remove(key);

        let scenario_name = take("run.scenario").ok_or_else(|| ConfigError::MissingKey("run.scenario".into()))?;
        let scenario = ScenarioKind::from_name(&scenario_name).ok_or_else(|| invalid("run.scenario", format!("unknown scenario `{scenario_name}`")))?;
        let mut c = RunConfig::defaults(scenario);

        let background = take("physics.background");
        if scenario == ScenarioKind::WellBalanced && background.is_none() {
            return Err(ConfigError::MissingKey("physics.background".into()));
        }
        if let Some(v) = background {
            c.background = named("physics.background", &v, Background::from_name)?;
        }
        if let Some(v) = take("physics.formulation") {
            c.formulation = named("physics.formulation", &v, Formulation::from_name)?;
            // energy runs default to the matching flux
            if c.formulation != c.flux.volume.formulation() {
                c.flux.volume = match c.formulation {
                    Formulation::Energy => VolumeFlux::RanochaEnergy,
                    Formulation::Theta => VolumeFlux::Etec,
                };
            }
        }
        if let Some(v) = take("physics.temperature_perturbation") {
            c.temperature_perturbation = number("physics.temperature_perturbation", &v)?;
        }
        if let Some(v) = take("physics.noise") {
            c.noise = number("physics.noise", &v)?;
        }
        if let Some(v) = take("run.end_time") {
            c.end_time = number("run.end_time", &v)?;
        }
        match (take("run.cfl"), take("run.dt")) {
            (Some(_), Some(_)) => return Err(ConfigError::Inconsistent("give either run.cfl or run.dt, not both".into())),
            (Some(v), None) => c.step = StepControl::Cfl(number("run.cfl", &v)?),
            (None, Some(v)) => c.step = StepControl::Fixed(number("run.dt", &v)?),
            (None, None) => {}
        }
        if let Some(v) = take("run.diagnostics_every") {
            c.diagnostics_every = number("run.diagnostics_every", &v)?;
        }
        if let Some(v) = take("run.output_dir") {
            c.output_dir = PathBuf::from(v);
        }
        if let Some(v) = take("run.seed") {
            c.seed = number("run.seed", &v)?;
        }
        if let Some(v) = take("flux.volume") {
            c.flux.volume = named("flux.volume", &v, VolumeFlux::from_name)?;
        }
        if let Some(v) = take("flux.density_mean") {
            c.flux.density_mean = named("flux.density_mean", &v, DensityMean::from_name)?;
        }
        if let Some(v) = take("flux.dissipation") {
            c.flux.dissipation = named("flux.dissipation", &v, Dissipation::from_name)?;
        }
        if let Some(v) = take("flux.gravity") {
            c.gravity = named("flux.gravity", &v, GravitySetting::from_name)?;
        }
        if let Some(v) = take("mesh.scheme") {
            c.scheme = named("mesh.scheme", &v, Scheme::from_name)?;
        }
        if let Some(v) = take("mesh.degree") {
            c.degree = number("mesh.degree", &v)?;
        }
        if let Some(v) = take("mesh.cells") {
            c.cells = v.split_whitespace().map(|n| number("mesh.cells", n)).collect::<Result<_, _>>()?;
        }
        if let Some(v) = take("mesh.geometry") {
            c.geometry = named("mesh.geometry", &v, Geometry::from_name)?;
        }
        if let Some(key) = entries.into_keys().next() {
            return Err(ConfigError::UnknownKey(key));
        }
        c.validate()?;
        Ok(c)
    }

    /// Writes every key; the output parses back to `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[run]");
        let _ = writeln!(out, "scenario = {}", self.scenario.name());
        let _ = writeln!(out, "end_time = {:?}", self.end_time);
        match self.step {
            StepControl::Cfl(c) => writeln!(out, "cfl = {c:?}"),
            StepControl::Fixed(dt) => writeln!(out, "dt = {dt:?}"),
        }
        .ok();
        let _ = writeln!(out, "diagnostics_every = {}", self.diagnostics_every);
        let _ = writeln!(out, "output_dir = {}", self.output_dir.display());
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "\n[physics]");
        let _ = writeln!(out, "formulation = {}", self.formulation.name());
        let _ = writeln!(out, "background = {}", self.background.name());
        let _ = writeln!(out, "temperature_perturbation = {:?}", self.temperature_perturbation);
        let _ = writeln!(out, "noise = {:?}", self.noise);
        let _ = writeln!(out, "\n[flux]");
        let _ = writeln!(out, "volume = {}", self.flux.volume.name());
        let _ = writeln!(out, "density_mean = {}", self.flux.density_mean.name());
        let _ = writeln!(out, "dissipation = {}", self.flux.dissipation.name());
        let _ = writeln!(out, "gravity = {}", self.gravity.name());
        let _ = writeln!(out, "\n[mesh]");
        let _ = writeln!(out, "scheme = {}", self.scheme.name());
        let _ = writeln!(out, "degree = {}", self.degree);
        let cells: Vec<String> = self.cells.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "cells = {}", cells.join(" "));
        let _ = writeln!(out, "geometry = {}", self.geometry.name());
        out
    }
}

impl FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RunConfig::parse(s)
    }
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue { key: key.into(), message: message.into() }
}

fn named<T>(key: &str, value: &str, lookup: impl Fn(&str) -> Option<T>) -> Result<T, ConfigError> {
    lookup(value).ok_or_else(|| invalid(key, format!("unrecognized value `{value}`")))
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| invalid(key, format!("`{value}`: {e}")))
}

/// `section.key -> value`, rejecting malformed lines, unknown keys and
/// repeated keys.
fn parse_entries(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut section: Option<String> = None;
    let mut entries = BTreeMap::new();
    for (number, raw) in text.lines().enumerate() {
        let line_no = number + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Syntax { line: line_no, message: "unterminated section header".into() })?;
            section = Some(name.trim().to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line: line_no, message: format!("expected `key = value`, got `{line}`") })?;
        let section = section
            .as_deref()
            .ok_or_else(|| ConfigError::Syntax { line: line_no, message: "key outside of a section".into() })?;
        let full = format!("{section}.{}", key.trim());
        if !KEYS.contains(&full.as_str()) {
            return Err(ConfigError::UnknownKey(full));
        }
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::Syntax { line: line_no, message: format!("empty value for `{full}`") });
        }
        if entries.insert(full.clone(), value.to_string()).is_some() {
            return Err(ConfigError::Syntax { line: line_no, message: format!("`{full}` given twice") });
        }
    }
    Ok(entries)
}
