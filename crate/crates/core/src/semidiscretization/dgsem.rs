use rayon::prelude::*;

use super::{admissible_point_values, slip_wall_ghost, Geopotential, GravityTreatment, SemiDiscretization};
use crate::error::EvalError;
use crate::fluxes::{pointwise_source, FluxKit, TwoPointFlux};
use crate::mesh::CurvilinearMesh;
use crate::state::{dot, norm, ConservedState, Euler, PointValues};

/// Flux-differencing DGSEM on LGL nodes.
///
/// Along each reference direction the volume term couples every node pair of
/// a line through the two-point flux `F` (symmetric) and the geopotential
/// term `G` (anti-symmetric), evaluated with the averaged contravariant
/// vector of the two nodes. Each pair is computed once. The diagonal and the
/// physical boundary fluxes cancel by the SBP property and are skipped.
pub struct Dgsem<const D: usize, F> {
    mesh: CurvilinearMesh<D>,
    eq: Euler,
    flux: F,
    gravity: GravityTreatment,
    geopotential: Geopotential<D>,
    weights: Vec<f64>,
    phi: Vec<f64>,
    grad_phi: Vec<[f64; D]>,
}

type FaceValues<const D: usize> = Vec<(ConservedState<D>, ConservedState<D>)>;

impl<const D: usize, F: TwoPointFlux<D>> Dgsem<D, F> {
    pub fn new(
        mesh: CurvilinearMesh<D>,
        eq: Euler,
        flux: F,
        gravity: GravityTreatment,
        geopotential: Geopotential<D>,
    ) -> Self {
        let (phi, grad_phi) = mesh.coords().iter().map(|x| geopotential.eval(x)).unzip();
        let weights = mesh.mass();
        Self { mesh, eq, flux, gravity, geopotential, weights, phi, grad_phi }
    }

    pub fn mesh(&self) -> &CurvilinearMesh<D> {
        &self.mesh
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

    #[inline]
    fn noncons(&self, a: &PointValues<D>, b: &PointValues<D>, phi_a: f64, phi_b: f64, n: &[f64; D]) -> ConservedState<D> {
        match self.gravity {
            GravityTreatment::NonConservative(kit) => kit.eval(&self.eq, a, b, phi_a, phi_b, n),
            _ => ConservedState::zero(),
        }
    }

    fn face_values(&self, u: &[ConservedState<D>], pv: &[PointValues<D>]) -> Vec<FaceValues<D>> {
        let m = self.mesh.operator().len();
        let npe = self.mesh.nodes_per_element();
        self.mesh
            .faces()
            .par_iter()
            .map(|face| {
                let d = face.direction;
                face.normals
                    .iter()
                    .enumerate()
                    .map(|(f, n)| {
                        let minus = face.minus.map(|e| e * npe + self.mesh.line_node(d, f, m - 1));
                        let plus = face.plus.map(|e| e * npe + self.mesh.line_node(d, f, 0));
                        let (um, pm, phi_m, up, pp, phi_p) = match (minus, plus) {
                            (Some(a), Some(b)) => (u[a], pv[a], self.phi[a], u[b], pv[b], self.phi[b]),
                            (Some(a), None) => {
                                let ghost = slip_wall_ghost(&u[a], n);
                                (u[a], pv[a], self.phi[a], ghost, self.eq.point_values(&ghost), self.phi[a])
                            }
                            (None, Some(b)) => {
                                let ghost = slip_wall_ghost(&u[b], n);
                                (ghost, self.eq.point_values(&ghost), self.phi[b], u[b], pv[b], self.phi[b])
                            }
                            (None, None) => unreachable!("a face has at least one element"),
                        };
                        let flux = self.flux.surface(&self.eq, &um, &pm, &up, &pp, n);
                        (flux, self.noncons(&pm, &pp, phi_m, phi_p, n))
                    })
                    .collect()
            })
            .collect()
    }
}

impl<const D: usize, F: TwoPointFlux<D>> SemiDiscretization<D> for Dgsem<D, F> {
    fn euler(&self) -> &Euler {
        &self.eq
    }

    fn len(&self) -> usize {
        self.mesh.num_nodes()
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn coordinates(&self) -> &[[f64; D]] {
        self.mesh.coords()
    }

    fn potential(&self) -> &[f64] {
        &self.phi
    }

    fn rhs(&self, u: &[ConservedState<D>], _t: f64, du: &mut [ConservedState<D>]) -> Result<(), EvalError> {
        assert_eq!(u.len(), self.len());
        assert_eq!(du.len(), self.len());
        let pv = admissible_point_values(&self.eq, u)?;
        let faces = self.face_values(u, &pv);
        let op = self.mesh.operator();
        let m = op.len();
        let npe = self.mesh.nodes_per_element();
        let w = op.weights();
        let ja = self.mesh.contravariant();
        let jac = self.mesh.jacobian();

        du.par_chunks_mut(npe).enumerate().for_each(|(e, rates)| {
            let base = e * npe;
            rates.fill(ConservedState::zero());
            for d in 0..D {
                for line in 0..npe / m {
                    for i in 0..m {
                        let li = self.mesh.line_node(d, line, i);
                        let gi = base + li;
                        for k in i + 1..m {
                            let lk = self.mesh.line_node(d, line, k);
                            let gk = base + lk;
                            let n: [f64; D] = std::array::from_fn(|c| 0.5 * (ja[gi][d][c] + ja[gk][d][c]));
                            let f = self.flux.volume(&self.eq, &pv[gi], &pv[gk], &n);
                            let g = self.noncons(&pv[gi], &pv[gk], self.phi[gi], self.phi[gk], &n);
                            let (dik, dki) = (op.d(i, k), op.d(k, i));
                            rates[li] -= f * (2.0 * dik) + g * dik;
                            rates[lk] -= f * (2.0 * dki) - g * dki;
                        }
                    }
                    let faces_of = self.mesh.element_faces(e);
                    let (f, g) = faces[faces_of[d][0]][line];
                    rates[self.mesh.line_node(d, line, 0)] += (f - g * 0.5) * (1.0 / w[0]);
                    let (f, g) = faces[faces_of[d][1]][line];
                    rates[self.mesh.line_node(d, line, m - 1)] -= (f + g * 0.5) * (1.0 / w[m - 1]);
                }
            }
            for (l, rate) in rates.iter_mut().enumerate() {
                let g = base + l;
                *rate = *rate * (1.0 / jac[g]);
                if self.gravity == GravityTreatment::Pointwise {
                    *rate += pointwise_source(&self.eq, &u[g], &self.grad_phi[g]);
                }
            }
        });
        Ok(())
    }

    fn max_dt(&self, u: &[ConservedState<D>], cfl: f64) -> f64 {
        let gamma = self.eq.gas.gamma;
        let ja = self.mesh.contravariant();
        let jac = self.mesh.jacobian();
        let worst = u
            .par_iter()
            .enumerate()
            .map(|(g, s)| {
                let pv = self.eq.point_values(s);
                let c = (gamma * pv.pressure / pv.rho).sqrt();
                (0..D).map(|d| dot(&pv.velocity, &ja[g][d]).abs() + c * norm(&ja[g][d])).sum::<f64>() / jac[g]
            })
            .reduce(|| 0.0, f64::max);
        cfl * 2.0 / (self.mesh.operator().len() as f64 * worst)
    }
}

/// Residual of a constant state on `mesh` without gravity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeStream {
    /// Largest absolute rate over nodes and components.
    pub residual: f64,
    /// Largest `sum_d |Ja^d| max|f| / J`, the size of a single flux-difference term.
    pub scale: f64,
}

/// Right-hand side of the constant state `state` on `mesh`, using `flux`
/// in volume and at interfaces.
pub fn free_stream_residual<const D: usize>(
    mesh: &CurvilinearMesh<D>,
    eq: &Euler,
    flux: FluxKit,
    state: ConservedState<D>,
) -> Result<FreeStream, EvalError> {
    let semi = Dgsem::new(mesh.clone(), *eq, flux, GravityTreatment::None, Geopotential::Zero);
    let u = vec![state; semi.len()];
    let du = semi.rhs_vec(&u, 0.0)?;
    let residual = du.iter().map(|r| r.max_abs()).fold(0.0, f64::max);
    let flux_size = (0..D)
        .map(|d| {
            let mut e = [0.0; D];
            e[d] = 1.0;
            eq.physical_flux(&state, &e).max_abs()
        })
        .fold(0.0, f64::max);
    let scale = mesh
        .contravariant()
        .iter()
        .zip(mesh.jacobian())
        .map(|(ja, j)| ja.iter().map(norm).sum::<f64>() * flux_size / j)
        .fold(0.0, f64::max)
        .max(1.0);
    Ok(FreeStream { residual, scale })
}
