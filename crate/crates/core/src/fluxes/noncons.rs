use serde::{Deserialize, Serialize};

use crate::averaging::{arithmetic_mean, log_mean, stolarsky_mean};
use crate::error::DomainError;
use crate::state::{dot, ConservedState, Euler, Formulation, PointValues};

/// Density average multiplying the geopotential jump.
///
/// The logarithmic mean balances isothermal atmospheres exactly, the
/// Stolarsky mean (with the gas `gamma`) balances constant potential
/// temperature atmospheres.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GravityMean {
    Logarithmic,
    Stolarsky,
    Arithmetic,
}

impl GravityMean {
    pub fn name(self) -> &'static str {
        match self {
            GravityMean::Logarithmic => "logarithmic",
            GravityMean::Stolarsky => "stolarsky",
            GravityMean::Arithmetic => "arithmetic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "logarithmic" => Some(GravityMean::Logarithmic),
            "stolarsky" => Some(GravityMean::Stolarsky),
            "arithmetic" => Some(GravityMean::Arithmetic),
            _ => None,
        }
    }
}

/// Non-conservative geopotential term `g(u_l, u_r) = mean(rho) [phi] n`,
/// with `mean(rho) mean(V . n) [phi]` in the energy row for the total energy
/// form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonConservativeKit {
    pub mean: GravityMean,
    #[serde(skip)]
    flip_jump: bool,
}

impl NonConservativeKit {
    pub fn new(mean: GravityMean) -> Self {
        Self { mean, flip_jump: false }
    }

    /// Mutation used by the negative-control harness: the jump factor is
    /// evaluated left-minus-right.
    #[doc(hidden)]
    pub fn with_flipped_jump(mut self) -> Self {
        self.flip_jump = true;
        self
    }

    #[inline]
    pub fn density_mean(&self, eq: &Euler, rho_a: f64, rho_b: f64) -> f64 {
        match self.mean {
            GravityMean::Logarithmic => log_mean(rho_a, rho_b),
            GravityMean::Stolarsky => stolarsky_mean(eq.gas.gamma, rho_a, rho_b),
            GravityMean::Arithmetic => arithmetic_mean(rho_a, rho_b),
        }
    }

    #[inline]
    pub fn eval<const D: usize>(
        &self,
        eq: &Euler,
        a: &PointValues<D>,
        b: &PointValues<D>,
        phi_a: f64,
        phi_b: f64,
        normal: &[f64; D],
    ) -> ConservedState<D> {
        let dphi = if self.flip_jump { phi_a - phi_b } else { phi_b - phi_a };
        if dphi == 0.0 {
            return ConservedState::zero();
        }
        let weight = self.density_mean(eq, a.rho, b.rho) * dphi;
        let closure = match eq.formulation {
            Formulation::Theta => 0.0,
            Formulation::Energy => weight * 0.5 * (dot(&a.velocity, normal) + dot(&b.velocity, normal)),
        };
        ConservedState { rho: 0.0, momentum: normal.map(|n| weight * n), closure }
    }

    /// Checked evaluation on full states.
    pub fn eval_states<const D: usize>(
        &self,
        eq: &Euler,
        u_l: &ConservedState<D>,
        u_r: &ConservedState<D>,
        phi_l: f64,
        phi_r: f64,
        normal: &[f64; D],
    ) -> Result<ConservedState<D>, DomainError> {
        for u in [u_l, u_r] {
            if self.mean != GravityMean::Arithmetic && !(u.rho > 0.0) {
                return Err(DomainError::NonPositiveMeanArgument {
                    kind: match self.mean {
                        GravityMean::Logarithmic => crate::averaging::MeanKind::Logarithmic,
                        _ => crate::averaging::MeanKind::Stolarsky(eq.gas.gamma),
                    },
                    value: u.rho,
                });
            }
        }
        Ok(self.eval(eq, &eq.point_values(u_l), &eq.point_values(u_r), phi_l, phi_r, normal))
    }
}

/// Point-wise gravity source `(0, -rho grad(phi), -rho V . grad(phi))`, the
/// last row only for the total energy form.
pub fn pointwise_source<const D: usize>(eq: &Euler, u: &ConservedState<D>, grad_phi: &[f64; D]) -> ConservedState<D> {
    let closure = match eq.formulation {
        Formulation::Theta => 0.0,
        Formulation::Energy => -dot(&u.momentum, grad_phi),
    };
    ConservedState { rho: 0.0, momentum: grad_phi.map(|g| -u.rho * g), closure }
}
