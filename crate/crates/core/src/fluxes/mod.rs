//! Two-point volume fluxes, interface dissipation and the geopotential
//! coupling.
//!
//! All fluxes take point values (see [`PointValues`]) and a normal vector
//! that need not have unit length; every flux is linear in the normal, so the
//! curvilinear solver passes averaged contravariant vectors directly.

mod noncons;
mod tadmor;

pub use noncons::{pointwise_source, GravityMean, NonConservativeKit};
pub use tadmor::{tadmor_residual, TadmorResidual};

use serde::{Deserialize, Serialize};

use crate::averaging::{arithmetic_mean, log_mean, stolarsky_mean};
use crate::state::{dot, norm, ConservedState, Euler, Formulation, PointValues};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeFlux {
    /// Total-energy conservative potential temperature flux.
    Tec,
    /// Entropy conservative potential temperature flux.
    Ec,
    /// Entropy and total-energy conservative potential temperature flux.
    Etec,
    /// Product of arithmetic means, potential temperature form.
    CentralTheta,
    /// Entropy conservative, kinetic energy and pressure equilibrium
    /// preserving flux for the total energy form.
    RanochaEnergy,
    /// Kennedy and Gruber split form for the total energy form.
    KennedyGruberEnergy,
}

impl VolumeFlux {
    pub const ALL: [VolumeFlux; 6] = [
        VolumeFlux::Tec,
        VolumeFlux::Ec,
        VolumeFlux::Etec,
        VolumeFlux::CentralTheta,
        VolumeFlux::RanochaEnergy,
        VolumeFlux::KennedyGruberEnergy,
    ];

    pub fn formulation(self) -> Formulation {
        match self {
            VolumeFlux::Tec | VolumeFlux::Ec | VolumeFlux::Etec | VolumeFlux::CentralTheta => Formulation::Theta,
            VolumeFlux::RanochaEnergy | VolumeFlux::KennedyGruberEnergy => Formulation::Energy,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VolumeFlux::Tec => "tec",
            VolumeFlux::Ec => "ec",
            VolumeFlux::Etec => "etec",
            VolumeFlux::CentralTheta => "central_theta",
            VolumeFlux::RanochaEnergy => "ranocha_energy",
            VolumeFlux::KennedyGruberEnergy => "kennedy_gruber_energy",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Density average inside the mass flux of the TEC and EC fluxes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMean {
    Arithmetic,
    Logarithmic,
}

impl DensityMean {
    pub fn name(self) -> &'static str {
        match self {
            DensityMean::Arithmetic => "arithmetic",
            DensityMean::Logarithmic => "logarithmic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "arithmetic" => Some(DensityMean::Arithmetic),
            "logarithmic" => Some(DensityMean::Logarithmic),
            _ => None,
        }
    }

    #[inline]
    fn eval(self, a: f64, b: f64) -> f64 {
        match self {
            DensityMean::Arithmetic => arithmetic_mean(a, b),
            DensityMean::Logarithmic => log_mean(a, b),
        }
    }
}

/// Interface dissipation added to the volume flux at element faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dissipation {
    None,
    /// `lambda = max(|V . n| + c |n|)`.
    Rusanov,
    /// `lambda = max(|V . n|)`; keeps `rho theta` non-negative under
    /// `dt <= dx / (2 lambda)` for first-order finite volumes.
    VelocityScaled,
}

impl Dissipation {
    pub fn name(self) -> &'static str {
        match self {
            Dissipation::None => "none",
            Dissipation::Rusanov => "rusanov",
            Dissipation::VelocityScaled => "velocity_scaled",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "none" => Some(Dissipation::None),
            "rusanov" => Some(Dissipation::Rusanov),
            "velocity_scaled" => Some(Dissipation::VelocityScaled),
            _ => None,
        }
    }
}

/// A symmetric, consistent two-point flux with optional surface dissipation.
///
/// The semi-discretizations are generic over this trait so that tests can
/// plug in partial fluxes (for example a pressure-only momentum flux).
pub trait TwoPointFlux<const D: usize>: Sync {
    fn volume(&self, eq: &Euler, a: &PointValues<D>, b: &PointValues<D>, normal: &[f64; D]) -> ConservedState<D>;

    /// Interface flux between `minus` and `plus`; the normal points from
    /// `minus` to `plus`.
    fn surface(
        &self,
        eq: &Euler,
        u_minus: &ConservedState<D>,
        minus: &PointValues<D>,
        u_plus: &ConservedState<D>,
        plus: &PointValues<D>,
        normal: &[f64; D],
    ) -> ConservedState<D> {
        let _ = (u_minus, u_plus);
        self.volume(eq, minus, plus, normal)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxKit {
    pub volume: VolumeFlux,
    pub density_mean: DensityMean,
    pub dissipation: Dissipation,
}

impl FluxKit {
    pub fn new(volume: VolumeFlux, density_mean: DensityMean, dissipation: Dissipation) -> Self {
        Self { volume, density_mean, dissipation }
    }

    /// Volume flux with the default logarithmic density mean and no dissipation.
    pub fn conservative(volume: VolumeFlux) -> Self {
        Self::new(volume, DensityMean::Logarithmic, Dissipation::None)
    }

    pub fn with_dissipation(mut self, dissipation: Dissipation) -> Self {
        self.dissipation = dissipation;
        self
    }

    pub fn with_density_mean(mut self, density_mean: DensityMean) -> Self {
        self.density_mean = density_mean;
        self
    }

    /// Flux evaluated on full states; convenience wrapper for tests and tools.
    pub fn eval<const D: usize>(
        &self,
        eq: &Euler,
        u_l: &ConservedState<D>,
        u_r: &ConservedState<D>,
        normal: &[f64; D],
    ) -> ConservedState<D> {
        self.volume(eq, &eq.point_values(u_l), &eq.point_values(u_r), normal)
    }

    /// Dissipation speed for the configured scheme, computed from point values.
    pub fn dissipation_speed<const D: usize>(
        &self,
        eq: &Euler,
        a: &PointValues<D>,
        b: &PointValues<D>,
        normal: &[f64; D],
    ) -> f64 {
        match self.dissipation {
            Dissipation::None => 0.0,
            Dissipation::Rusanov => {
                let n = norm(normal);
                let one = |p: &PointValues<D>| dot(&p.velocity, normal).abs() + (eq.gas.gamma * p.pressure / p.rho).sqrt() * n;
                one(a).max(one(b))
            }
            Dissipation::VelocityScaled => dot(&a.velocity, normal).abs().max(dot(&b.velocity, normal).abs()),
        }
    }
}

impl<const D: usize> TwoPointFlux<D> for FluxKit {
    #[inline]
    fn volume(&self, eq: &Euler, a: &PointValues<D>, b: &PointValues<D>, normal: &[f64; D]) -> ConservedState<D> {
        debug_assert_eq!(self.volume.formulation(), eq.formulation);
        let vn_a = dot(&a.velocity, normal);
        let vn_b = dot(&b.velocity, normal);
        let vn = 0.5 * (vn_a + vn_b);
        let gamma = eq.gas.gamma;

        let (f_rho, f_closure) = match self.volume {
            VolumeFlux::Tec => {
                let f_rho = self.density_mean.eval(a.rho, b.rho) * vn;
                (f_rho, stolarsky_mean(gamma, a.closure, b.closure) * vn)
            }
            VolumeFlux::Ec => {
                let f_rho = self.density_mean.eval(a.rho, b.rho) * vn;
                (f_rho, f_rho / log_mean(a.ratio, b.ratio))
            }
            VolumeFlux::Etec => {
                let f_closure = stolarsky_mean(gamma, a.closure, b.closure) * vn;
                (f_closure * log_mean(a.ratio, b.ratio), f_closure)
            }
            VolumeFlux::CentralTheta => {
                let f_rho = arithmetic_mean(a.rho, b.rho) * vn;
                (f_rho, f_rho * arithmetic_mean(a.closure / a.rho, b.closure / b.rho))
            }
            VolumeFlux::RanochaEnergy => {
                let f_rho = log_mean(a.rho, b.rho) * vn;
                let internal = 1.0 / ((gamma - 1.0) * log_mean(a.ratio, b.ratio));
                let f_e = f_rho * (0.5 * dot(&a.velocity, &b.velocity) + internal)
                    + 0.5 * (a.pressure * vn_b + b.pressure * vn_a);
                (f_rho, f_e)
            }
            VolumeFlux::KennedyGruberEnergy => {
                let f_rho = arithmetic_mean(a.rho, b.rho) * vn;
                let p = arithmetic_mean(a.pressure, b.pressure);
                (f_rho, f_rho * arithmetic_mean(a.closure / a.rho, b.closure / b.rho) + p * vn)
            }
        };

        let p = arithmetic_mean(a.pressure, b.pressure);
        let mut momentum = [0.0; D];
        for d in 0..D {
            momentum[d] = f_rho * arithmetic_mean(a.velocity[d], b.velocity[d]) + p * normal[d];
        }
        ConservedState { rho: f_rho, momentum, closure: f_closure }
    }

    #[inline]
    fn surface(
        &self,
        eq: &Euler,
        u_minus: &ConservedState<D>,
        minus: &PointValues<D>,
        u_plus: &ConservedState<D>,
        plus: &PointValues<D>,
        normal: &[f64; D],
    ) -> ConservedState<D> {
        let f = TwoPointFlux::<D>::volume(self, eq, minus, plus, normal);
        if self.dissipation == Dissipation::None {
            return f;
        }
        let lambda = self.dissipation_speed(eq, minus, plus, normal);
        f - (*u_plus - *u_minus) * (0.5 * lambda)
    }
}
