//! Spatial right-hand sides: Cartesian finite volumes and flux-differencing
//! DGSEM, both with conservative symmetric and non-conservative
//! anti-symmetric two-point terms.

mod boundary;
mod dgsem;
mod fv;

pub use boundary::slip_wall_ghost;
pub use dgsem::{free_stream_residual, Dgsem, FreeStream};
pub use fv::FiniteVolume;

use std::fmt;
use std::sync::Arc;

use crate::error::EvalError;
use crate::fluxes::NonConservativeKit;
use crate::state::{ConservedState, Euler, PointValues};

/// How gravity enters the discretization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GravityTreatment {
    None,
    /// Two-point `mean(rho) [phi]` terms at interfaces and inside elements.
    NonConservative(NonConservativeKit),
    /// `-rho grad(phi)` evaluated at each node from the analytic gradient.
    Pointwise,
}

/// `phi` and its gradient at a point.
pub type GeopotentialField<const D: usize> = Arc<dyn Fn(&[f64; D]) -> (f64, [f64; D]) + Send + Sync>;

/// Geopotential `phi` and its gradient as functions of position.
#[derive(Clone)]
pub enum Geopotential<const D: usize> {
    Zero,
    /// `phi = g x[axis]`.
    Linear { g: f64, axis: usize },
    Field(GeopotentialField<D>),
}

impl<const D: usize> Geopotential<D> {
    pub fn field<F>(f: F) -> Self
    where
        F: Fn(&[f64; D]) -> (f64, [f64; D]) + Send + Sync + 'static,
    {
        Geopotential::Field(Arc::new(f))
    }

    /// `(phi, grad phi)` at `x`.
    pub fn eval(&self, x: &[f64; D]) -> (f64, [f64; D]) {
        match self {
            Geopotential::Zero => (0.0, [0.0; D]),
            Geopotential::Linear { g, axis } => {
                let mut grad = [0.0; D];
                grad[*axis] = *g;
                (g * x[*axis], grad)
            }
            Geopotential::Field(f) => f(x),
        }
    }
}

impl<const D: usize> fmt::Debug for Geopotential<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Geopotential::Zero => write!(f, "Zero"),
            Geopotential::Linear { g, axis } => write!(f, "Linear {{ g: {g}, axis: {axis} }}"),
            Geopotential::Field(_) => write!(f, "Field(..)"),
        }
    }
}

/// A spatial discretization `du/dt = R(u)` over a fixed set of collocation
/// points (cells or nodes).
pub trait SemiDiscretization<const D: usize>: Sync {
    fn euler(&self) -> &Euler;

    /// Number of degrees of freedom (states).
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of each point (`dx` volume or `J w`).
    fn weights(&self) -> &[f64];

    fn coordinates(&self) -> &[[f64; D]];

    /// Geopotential collocated at each point.
    fn potential(&self) -> &[f64];

    /// Total measure of the domain.
    fn domain_volume(&self) -> f64 {
        self.weights().iter().sum()
    }

    /// Evaluates the right-hand side into `du`.
    fn rhs(&self, u: &[ConservedState<D>], t: f64, du: &mut [ConservedState<D>]) -> Result<(), EvalError>;

    /// Largest stable time step for the given CFL number.
    fn max_dt(&self, u: &[ConservedState<D>], cfl: f64) -> f64;

    fn rhs_vec(&self, u: &[ConservedState<D>], t: f64) -> Result<Vec<ConservedState<D>>, EvalError> {
        let mut du = vec![ConservedState::zero(); u.len()];
        self.rhs(u, t, &mut du)?;
        Ok(du)
    }
}

/// Point values of every state, rejecting the first inadmissible one.
pub(crate) fn admissible_point_values<const D: usize>(
    eq: &Euler,
    u: &[ConservedState<D>],
) -> Result<Vec<PointValues<D>>, EvalError> {
    use rayon::prelude::*;
    u.par_iter()
        .enumerate()
        .map(|(index, s)| eq.admissible_point_values(s).map_err(|source| EvalError::Inadmissible { index, source }))
        .collect()
}
