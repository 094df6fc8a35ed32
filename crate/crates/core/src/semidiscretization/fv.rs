use rayon::prelude::*;

use super::{admissible_point_values, slip_wall_ghost, Geopotential, GravityTreatment, SemiDiscretization};
use crate::error::EvalError;
use crate::fluxes::{pointwise_source, TwoPointFlux};
use crate::mesh::CartesianGrid;
use crate::state::{ConservedState, Euler, PointValues};

/// First-order finite volumes on a uniform Cartesian grid. Interface `i+1/2`
/// contributes `-(F + G/2)/dx` to the left cell and `(F - G/2)/dx` to the
/// right one, where `G` is the non-conservative geopotential term.
pub struct FiniteVolume<const D: usize, F> {
    grid: CartesianGrid<D>,
    eq: Euler,
    flux: F,
    gravity: GravityTreatment,
    geopotential: Geopotential<D>,
    coords: Vec<[f64; D]>,
    weights: Vec<f64>,
    phi: Vec<f64>,
    grad_phi: Vec<[f64; D]>,
}

impl<const D: usize, F: TwoPointFlux<D>> FiniteVolume<D, F> {
    pub fn new(grid: CartesianGrid<D>, eq: Euler, flux: F, gravity: GravityTreatment, geopotential: Geopotential<D>) -> Self {
        let n = grid.num_cells();
        let coords: Vec<_> = (0..n).map(|i| grid.center(i)).collect();
        let (phi, grad_phi) = coords.iter().map(|x| geopotential.eval(x)).unzip();
        let weights = vec![grid.cell_volume(); n];
        Self { grid, eq, flux, gravity, geopotential, coords, weights, phi, grad_phi }
    }

    pub fn grid(&self) -> &CartesianGrid<D> {
        &self.grid
    }

    pub fn flux(&self) -> &F {
        &self.flux
    }

    pub fn gravity(&self) -> GravityTreatment {
        self.gravity
    }

    pub fn geopotential(&self) -> &Geopotential<D> {
        &self.geopotential
    }

    /// `(F, G)` on the face between `minus` and `plus` along `direction`;
    /// `None` stands for the slip-wall mirror of the other cell.
    fn face(
        &self,
        u: &[ConservedState<D>],
        pv: &[PointValues<D>],
        direction: usize,
        minus: Option<usize>,
        plus: Option<usize>,
    ) -> (ConservedState<D>, ConservedState<D>) {
        let mut normal = [0.0; D];
        normal[direction] = 1.0;
        let (um, pm, phi_m, up, pp, phi_p) = match (minus, plus) {
            (Some(a), Some(b)) => (u[a], pv[a], self.phi[a], u[b], pv[b], self.phi[b]),
            (Some(a), None) => {
                let ghost = slip_wall_ghost(&u[a], &normal);
                (u[a], pv[a], self.phi[a], ghost, self.eq.point_values(&ghost), self.phi[a])
            }
            (None, Some(b)) => {
                let ghost = slip_wall_ghost(&u[b], &normal);
                (ghost, self.eq.point_values(&ghost), self.phi[b], u[b], pv[b], self.phi[b])
            }
            (None, None) => unreachable!("a face has at least one cell"),
        };
        let f = self.flux.surface(&self.eq, &um, &pm, &up, &pp, &normal);
        let g = match self.gravity {
            GravityTreatment::NonConservative(kit) => kit.eval(&self.eq, &pm, &pp, phi_m, phi_p, &normal),
            _ => ConservedState::zero(),
        };
        (f, g)
    }
}

impl<const D: usize, F: TwoPointFlux<D>> SemiDiscretization<D> for FiniteVolume<D, F> {
    fn euler(&self) -> &Euler {
        &self.eq
    }

    fn len(&self) -> usize {
        self.grid.num_cells()
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn coordinates(&self) -> &[[f64; D]] {
        &self.coords
    }

    fn potential(&self) -> &[f64] {
        &self.phi
    }

    fn domain_volume(&self) -> f64 {
        self.grid.domain_volume()
    }

    fn rhs(&self, u: &[ConservedState<D>], _t: f64, du: &mut [ConservedState<D>]) -> Result<(), EvalError> {
        assert_eq!(u.len(), self.len());
        assert_eq!(du.len(), self.len());
        let pv = admissible_point_values(&self.eq, u)?;
        // upper face of every cell, per direction
        let upper: Vec<Vec<(ConservedState<D>, ConservedState<D>)>> = (0..D)
            .map(|d| {
                (0..self.len())
                    .into_par_iter()
                    .map(|i| self.face(u, &pv, d, Some(i), self.grid.neighbor(i, d, 1)))
                    .collect()
            })
            .collect();
        let spacing = self.grid.spacing();
        du.par_iter_mut().enumerate().for_each(|(i, rate)| {
            let mut acc = ConservedState::zero();
            for d in 0..D {
                let inv_dx = 1.0 / spacing[d];
                let (f, g) = upper[d][i];
                acc -= (f + g * 0.5) * inv_dx;
                let (f, g) = match self.grid.neighbor(i, d, 0) {
                    Some(j) => upper[d][j],
                    None => self.face(u, &pv, d, None, Some(i)),
                };
                acc += (f - g * 0.5) * inv_dx;
            }
            if self.gravity == GravityTreatment::Pointwise {
                acc += pointwise_source(&self.eq, &u[i], &self.grad_phi[i]);
            }
            *rate = acc;
        });
        Ok(())
    }

    fn max_dt(&self, u: &[ConservedState<D>], cfl: f64) -> f64 {
        let spacing = self.grid.spacing();
        let gamma = self.eq.gas.gamma;
        let worst = u
            .par_iter()
            .map(|s| {
                let pv = self.eq.point_values(s);
                let c = (gamma * pv.pressure / pv.rho).sqrt();
                (0..D).map(|d| (pv.velocity[d].abs() + c) / spacing[d]).sum::<f64>()
            })
            .reduce(|| 0.0, f64::max);
        cfl / worst
    }
}
