//! Initial data and reference solutions of the benchmark scenarios, and the
//! assembly of a runnable problem from a [`RunConfig`].

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Background, Geometry, GravitySetting, RunConfig, ScenarioKind, Scheme};
use crate::error::{ConfigError, Error};
use crate::fluxes::NonConservativeKit;
use crate::mesh::{warped_square, CartesianGrid, CurvilinearMesh};
use crate::sbp::SbpOperatorSet;
use crate::semidiscretization::{Dgsem, FiniteVolume, Geopotential, GravityTreatment, SemiDiscretization};
use crate::state::{ConservedState, Euler, GasConstants, PrimitiveState};

/// Temperature of the isothermal background, in kelvin.
pub const ISOTHERMAL_TEMPERATURE: f64 = 250.0;
/// Potential temperature of the adiabatic background, in kelvin.
pub const ADIABATIC_THETA: f64 = 300.0;
/// Side length of the well-balanced box.
pub const BALANCE_DOMAIN: f64 = 1000.0;

/// `rho = 1 + exp(sin(2 pi (x - t)))`, `v = 1`, `p = 1` on the unit period.
pub fn density_wave(x: f64, t: f64) -> PrimitiveState<1> {
    let xi = (x - t).rem_euclid(1.0);
    PrimitiveState::new(1.0 + (2.0 * PI * xi).sin().exp(), [1.0], 1.0)
}

pub fn taylor_green(x: &[f64; 3]) -> PrimitiveState<3> {
    let (sx, cx) = x[0].sin_cos();
    let (sy, cy) = x[1].sin_cos();
    let cz = x[2].cos();
    let (c2x, c2y) = ((2.0 * x[0]).cos(), (2.0 * x[1]).cos());
    // second factor in x as published, not the usual cos(2z) + 2
    let p = 10.0 + ((c2x + c2y) * (c2x + 2.0) - 2.0) / 16.0;
    PrimitiveState::new(1.0, [sx * cy * cz, -cx * sy * cz, 0.0], p)
}

/// Hydrostatic isothermal state `p = p0 exp(-phi / (R T))`, `rho = p / (R T)`.
pub fn isothermal(gas: &GasConstants, temperature: f64, phi: f64) -> (f64, f64) {
    let p = gas.p0 * (-phi / (gas.r * temperature)).exp();
    (p / (gas.r * temperature), p)
}

/// Hydrostatic state of constant potential temperature with `p = p0` at
/// `phi = 0`:
/// `rho^(gamma-1) = rho0^(gamma-1) - (gamma-1) phi / (K gamma theta^gamma)`.
pub fn adiabatic(gas: &GasConstants, theta: f64, phi: f64) -> Result<(f64, f64), ConfigError> {
    let gm1 = gas.gamma - 1.0;
    let rho0 = gas.p0 / (gas.r * theta);
    let base = rho0.powf(gm1) - gm1 * phi / (gas.k * gas.gamma * theta.powf(gas.gamma));
    if !(base > 0.0) {
        return Err(ConfigError::Inconsistent(format!(
            "the constant potential temperature atmosphere has no density left at phi = {phi}"
        )));
    }
    let rho = base.powf(1.0 / gm1);
    Ok((rho, gas.k * (rho * theta).powf(gas.gamma)))
}

/// Hydrostatic background `(rho, p)` at geopotential `phi`.
pub fn background(gas: &GasConstants, kind: Background, phi: f64) -> Result<(f64, f64), ConfigError> {
    match kind {
        Background::Isothermal => Ok(isothermal(gas, ISOTHERMAL_TEMPERATURE, phi)),
        Background::Adiabatic => adiabatic(gas, ADIABATIC_THETA, phi),
    }
}

/// Warm-bubble perturbation of an isothermal channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GravityWave {
    pub delta_t: f64,
    pub length: f64,
    pub height: f64,
    pub center: f64,
    pub radius: f64,
}

impl GravityWave {
    /// 300 km by 10 km channel, bubble at 100 km with radius 5 km.
    pub fn channel(delta_t: f64) -> Self {
        Self { delta_t, length: 300e3, height: 10e3, center: 100e3, radius: 5e3 }
    }

    /// `T' = dT sin(pi z / H) exp(-(x - xc)^2 / a^2)`.
    pub fn temperature_perturbation(&self, x: &[f64; 2]) -> f64 {
        let s = (x[0] - self.center) / self.radius;
        self.delta_t * (PI * x[1] / self.height).sin() * (-s * s).exp()
    }

    /// Background pressure with the perturbed temperature, at rest.
    pub fn primitive(&self, gas: &GasConstants, x: &[f64; 2]) -> PrimitiveState<2> {
        let (_, p) = isothermal(gas, ISOTHERMAL_TEMPERATURE, gas.g * x[1]);
        let t = ISOTHERMAL_TEMPERATURE + self.temperature_perturbation(x);
        PrimitiveState::new(p / (gas.r * t), [0.0; 2], p)
    }
}

/// Primitive reference as a function of position and time.
pub type Reference<const D: usize> = Arc<dyn Fn(&[f64; D], f64) -> PrimitiveState<D> + Send + Sync>;

/// A ready-to-run discretization with its initial field.
pub struct Setup<const D: usize> {
    pub semi: Box<dyn SemiDiscretization<D>>,
    pub initial: Vec<ConservedState<D>>,
    /// Exact solution (density wave) or hydrostatic background (gravity
    /// scenarios); the runner reports errors against it.
    pub reference: Option<Reference<D>>,
}

pub enum Problem {
    One(Setup<1>),
    Two(Setup<2>),
    Three(Setup<3>),
}

fn gravity_treatment(setting: GravitySetting) -> GravityTreatment {
    match setting {
        GravitySetting::None => GravityTreatment::None,
        GravitySetting::NonConservative(mean) => GravityTreatment::NonConservative(NonConservativeKit::new(mean)),
        GravitySetting::Pointwise => GravityTreatment::Pointwise,
    }
}

fn operator(degree: usize) -> Result<Arc<SbpOperatorSet>, Error> {
    if degree == 0 {
        Ok(SbpOperatorSet::single_node())
    } else {
        Ok(SbpOperatorSet::lgl(degree)?)
    }
}

/// Finite volumes on the box, or the DGSEM on an affine or warped mesh of it.
fn discretize<const D: usize>(
    config: &RunConfig,
    eq: Euler,
    lower: [f64; D],
    upper: [f64; D],
    periodic: [bool; D],
    geopotential: Geopotential<D>,
) -> Result<Box<dyn SemiDiscretization<D>>, Error> {
    let counts: [usize; D] = std::array::from_fn(|d| config.cells[d]);
    let gravity = gravity_treatment(config.gravity);
    match config.scheme {
        Scheme::FiniteVolume => {
            let grid = CartesianGrid::new(counts, lower, upper, periodic)?;
            Ok(Box::new(FiniteVolume::new(grid, eq, config.flux, gravity, geopotential)))
        }
        Scheme::Dgsem => {
            let op = operator(config.degree)?;
            let mesh = match config.geometry {
                Geometry::Flat => CurvilinearMesh::cartesian(counts, op, lower, upper, periodic)?,
                // validation restricts warping to the 2D balance box
                Geometry::Warped => CurvilinearMesh::new(counts, op, periodic, |r: &[f64; D]| {
                    let mapped = warped_square(&[r[0], r[1]]);
                    std::array::from_fn(|d| mapped[d])
                })?,
            };
            Ok(Box::new(Dgsem::new(mesh, eq, config.flux, gravity, geopotential)))
        }
    }
}

fn conserved<const D: usize>(
    semi: &dyn SemiDiscretization<D>,
    config: &RunConfig,
    primitive: impl Fn(&[f64; D]) -> Result<PrimitiveState<D>, ConfigError>,
) -> Result<Vec<ConservedState<D>>, Error> {
    let eq = semi.euler();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    semi.coordinates()
        .iter()
        .map(|x| {
            let mut prim = primitive(x)?;
            if config.noise > 0.0 {
                prim.rho *= 1.0 + config.noise * rng.gen_range(-1.0..1.0);
            }
            Ok(eq.conservative_from_primitive(&prim)?)
        })
        .collect()
}

/// Builds the discretization and initial field described by `config`.
pub fn build(config: &RunConfig) -> Result<Problem, Error> {
    config.validate()?;
    let gas = GasConstants::dry_air();
    let eq = Euler::new(gas, config.formulation);
    match config.scenario {
        ScenarioKind::DensityWave => {
            let semi = discretize(config, eq, [0.0], [1.0], [true], Geopotential::Zero)?;
            let initial = conserved(semi.as_ref(), config, |x| Ok(density_wave(x[0], 0.0)))?;
            let reference: Reference<1> = Arc::new(|x, t| density_wave(x[0], t));
            Ok(Problem::One(Setup { semi, initial, reference: Some(reference) }))
        }
        ScenarioKind::TaylorGreen => {
            let semi = discretize(config, eq, [0.0; 3], [2.0 * PI; 3], [true; 3], Geopotential::Zero)?;
            let initial = conserved(semi.as_ref(), config, |x| Ok(taylor_green(x)))?;
            Ok(Problem::Three(Setup { semi, initial, reference: None }))
        }
        ScenarioKind::WellBalanced => {
            let kind = config.background;
            // fail early if the top of the box is above the adiabatic ceiling
            background(&gas, kind, gas.g * BALANCE_DOMAIN)?;
            let semi = discretize(
                config,
                eq,
                [0.0; 2],
                [BALANCE_DOMAIN; 2],
                [false; 2],
                Geopotential::Linear { g: gas.g, axis: 1 },
            )?;
            let state = move |x: &[f64; 2]| {
                background(&gas, kind, gas.g * x[1]).map(|(rho, p)| PrimitiveState::new(rho, [0.0; 2], p))
            };
            let initial = conserved(semi.as_ref(), config, state)?;
            let reference: Reference<2> = Arc::new(move |x, _| state(x).expect("checked at the domain top"));
            Ok(Problem::Two(Setup { semi, initial, reference: Some(reference) }))
        }
        ScenarioKind::InertiaGravityWave => {
            let wave = GravityWave::channel(config.temperature_perturbation);
            let semi = discretize(
                config,
                eq,
                [0.0; 2],
                [wave.length, wave.height],
                [true, false],
                Geopotential::Linear { g: gas.g, axis: 1 },
            )?;
            let initial = conserved(semi.as_ref(), config, |x| Ok(wave.primitive(&gas, x)))?;
            let reference: Reference<2> = Arc::new(move |x, _| {
                let (rho, p) = isothermal(&gas, ISOTHERMAL_TEMPERATURE, gas.g * x[1]);
                PrimitiveState::new(rho, [0.0; 2], p)
            });
            Ok(Problem::Two(Setup { semi, initial, reference: Some(reference) }))
        }
    }
}
