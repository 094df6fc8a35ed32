use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thetaflux::fluxes::{
    DensityMean, Dissipation, FluxKit, GravityMean, NonConservativeKit, TwoPointFlux, VolumeFlux,
};
use thetaflux::mesh::{CartesianGrid, CurvilinearMesh};
use thetaflux::sbp::SbpOperatorSet;
use thetaflux::semidiscretization::{
    free_stream_residual, Dgsem, FiniteVolume, Geopotential, GravityTreatment, SemiDiscretization,
};
use thetaflux::state::{dot, ConservedState, EntropyKind, Euler, GasConstants, PointValues, PrimitiveState};

fn gas() -> GasConstants {
    GasConstants::dry_air()
}

fn random_field<const D: usize>(eq: &Euler, coords: &[[f64; D]], seed: u64) -> Vec<ConservedState<D>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    coords
        .iter()
        .map(|_| {
            let rho = rng.gen_range(0.5..2.0);
            let v = std::array::from_fn(|_| rng.gen_range(-30.0..30.0));
            let p = rng.gen_range(0.5e5..1.5e5);
            eq.conservative_from_primitive(&PrimitiveState::new(rho, v, p)).unwrap()
        })
        .collect()
}

/// `sum_i w_i c_i . du_i` and the matching sum of magnitudes.
fn contract<const D: usize>(
    w: &[f64],
    du: &[ConservedState<D>],
    covector: impl Fn(usize) -> ConservedState<D>,
) -> (f64, f64) {
    let mut total = 0.0;
    let mut scale = 0.0;
    for (i, (wi, r)) in w.iter().zip(du).enumerate() {
        let c = covector(i);
        total += wi * c.dot(r);
        scale += wi * c.hadamard(r).iter().map(f64::abs).sum::<f64>();
    }
    (total, scale.max(1.0))
}

fn smooth_potential_2d() -> Geopotential<2> {
    use std::f64::consts::PI;
    Geopotential::field(|x: &[f64; 2]| {
        let (a, b) = (2.0 * PI * x[0] / 1000.0, 2.0 * PI * x[1] / 1000.0);
        (500.0 * a.sin() * b.cos(), [500.0 * 2.0 * PI / 1000.0 * a.cos() * b.cos(), -500.0 * 2.0 * PI / 1000.0 * a.sin() * b.sin()])
    })
}

fn warped_periodic(n: usize) -> CurvilinearMesh<2> {
    CurvilinearMesh::warped([4, 4], SbpOperatorSet::lgl(n).unwrap(), [true, true]).unwrap()
}

#[test]
fn constant_state_has_zero_rates() {
    let eq = Euler::theta(gas());
    let u = eq.conservative_from_primitive(&PrimitiveState::new(1.2, [3.0, -1.0], 1e5)).unwrap();
    let grid = CartesianGrid::new([8, 5], [0.0, 0.0], [1.0, 2.0], [true, true]).unwrap();
    let kit = FluxKit::conservative(VolumeFlux::Etec).with_dissipation(Dissipation::Rusanov);
    let fv = FiniteVolume::new(grid, eq, kit, GravityTreatment::None, Geopotential::Zero);
    let du = fv.rhs_vec(&vec![u; fv.len()], 0.0).unwrap();
    assert!(du.iter().all(|r| r.max_abs() < 1e-9));
}

#[test]
fn three_cell_rates_match_hand_computation() {
    let eq = Euler::energy(gas());
    let a = eq.conservative_from_primitive(&PrimitiveState::new(1.0, [2.0], 1e5)).unwrap();
    let b = eq.conservative_from_primitive(&PrimitiveState::new(1.5, [1.0], 1.2e5)).unwrap();
    let grid = CartesianGrid::new([3], [0.0], [3.0], [true]).unwrap();
    let kit = FluxKit::conservative(VolumeFlux::RanochaEnergy);
    let fv = FiniteVolume::new(grid, eq, kit, GravityTreatment::None, Geopotential::Zero);
    let du = fv.rhs_vec(&[a, b, b], 0.0).unwrap();
    let f_ab = kit.eval(&eq, &a, &b, &[1.0]);
    let f_bb = eq.physical_flux(&b, &[1.0]);
    let f_ba = kit.eval(&eq, &b, &a, &[1.0]);
    let expected = [f_ba - f_ab, f_ab - f_bb, f_bb - f_ba];
    for (got, want) in du.iter().zip(expected) {
        assert!((*got - want).max_abs() < 1e-9, "{got:?} vs {want:?}");
    }
}

#[test]
fn periodic_schemes_conserve_the_state_integrals() {
    let eq = Euler::theta(gas());
    let kit = FluxKit::conservative(VolumeFlux::Ec).with_dissipation(Dissipation::Rusanov);
    let dg = Dgsem::new(warped_periodic(3), eq, kit, GravityTreatment::None, Geopotential::Zero);
    let u = random_field(&eq, dg.coordinates(), 1);
    let du = dg.rhs_vec(&u, 0.0).unwrap();
    for var in 0..4 {
        let (total, scale) = contract(dg.weights(), &du, |_| {
            let mut c = ConservedState::zero();
            c[var] = 1.0;
            c
        });
        assert!(total.abs() <= 1e-12 * scale, "var {var}: {total} vs {scale}");
    }

    let grid = CartesianGrid::new([6, 5, 4], [0.0; 3], [1.0, 2.0, 3.0], [true; 3]).unwrap();
    let fv = FiniteVolume::new(grid, eq, FluxKit::conservative(VolumeFlux::Tec), GravityTreatment::None, Geopotential::Zero);
    let u = random_field(&eq, fv.coordinates(), 2);
    let du = fv.rhs_vec(&u, 0.0).unwrap();
    for var in 0..5 {
        let (total, scale) = contract(fv.weights(), &du, |_| {
            let mut c = ConservedState::zero();
            c[var] = 1.0;
            c
        });
        assert!(total.abs() <= 1e-12 * scale, "var {var}: {total} vs {scale}");
    }
}

fn entropy_rate<const D: usize, S: SemiDiscretization<D>>(semi: &S, u: &[ConservedState<D>], kind: EntropyKind) -> (f64, f64) {
    let du = semi.rhs_vec(u, 0.0).unwrap();
    let eq = *semi.euler();
    contract(semi.weights(), &du, |i| eq.entropy_variables(&u[i], kind))
}

#[test]
fn entropy_conservative_dgsem() {
    let cases = [
        (VolumeFlux::Ec, EntropyKind::RhoS),
        (VolumeFlux::Etec, EntropyKind::RhoS),
        (VolumeFlux::Tec, EntropyKind::RhoE),
        (VolumeFlux::Etec, EntropyKind::RhoE),
        (VolumeFlux::RanochaEnergy, EntropyKind::RhoS),
    ];
    for n in [2, 3] {
        for (volume, kind) in cases {
            let eq = Euler::new(gas(), volume.formulation());
            let dg = Dgsem::new(warped_periodic(n), eq, FluxKit::conservative(volume), GravityTreatment::None, Geopotential::Zero);
            let u = random_field(&eq, dg.coordinates(), 3);
            let (rate, scale) = entropy_rate(&dg, &u, kind);
            assert!(rate.abs() <= 1e-11 * scale, "{volume:?} {kind:?} N={n}: {rate} vs {scale}");
        }
    }
}

#[test]
fn entropy_conservative_finite_volumes() {
    for (volume, kind) in [(VolumeFlux::Ec, EntropyKind::RhoS), (VolumeFlux::Tec, EntropyKind::RhoE)] {
        let eq = Euler::new(gas(), volume.formulation());
        let grid = CartesianGrid::new([7, 6], [0.0; 2], [1.0, 1.0], [true; 2]).unwrap();
        let fv = FiniteVolume::new(grid, eq, FluxKit::conservative(volume), GravityTreatment::None, Geopotential::Zero);
        let u = random_field(&eq, fv.coordinates(), 4);
        let (rate, scale) = entropy_rate(&fv, &u, kind);
        assert!(rate.abs() <= 1e-11 * scale, "{volume:?}: {rate} vs {scale}");
    }
}

#[test]
fn dissipation_produces_entropy() {
    let eq = Euler::theta(gas());
    let kit = FluxKit::conservative(VolumeFlux::Ec).with_dissipation(Dissipation::Rusanov);
    let dg = Dgsem::new(warped_periodic(2), eq, kit, GravityTreatment::None, Geopotential::Zero);
    let u = random_field(&eq, dg.coordinates(), 5);
    let (rate, _) = entropy_rate(&dg, &u, EntropyKind::RhoS);
    // rho s is a concave entropy; dissipation must increase it
    assert!(rate > 0.0);
}

fn total_energy_rate<const D: usize, S: SemiDiscretization<D>>(semi: &S, u: &[ConservedState<D>]) -> (f64, f64) {
    let du = semi.rhs_vec(u, 0.0).unwrap();
    let eq = *semi.euler();
    let phi = semi.potential();
    contract(semi.weights(), &du, |i| {
        let mut c = eq.entropy_variables(&u[i], EntropyKind::RhoE);
        c.rho += phi[i];
        c
    })
}

#[test]
fn total_energy_with_gravity_is_conserved_by_tec_fluxes() {
    let kit = NonConservativeKit::new(GravityMean::Logarithmic);
    for (volume, expect_conservative) in
        [(VolumeFlux::Tec, true), (VolumeFlux::RanochaEnergy, true), (VolumeFlux::Etec, false)]
    {
        let eq = Euler::new(gas(), volume.formulation());
        let dg = Dgsem::new(
            warped_periodic(3),
            eq,
            FluxKit::conservative(volume),
            GravityTreatment::NonConservative(kit),
            smooth_potential_2d(),
        );
        let u = random_field(&eq, dg.coordinates(), 6);
        let (rate, scale) = total_energy_rate(&dg, &u);
        if expect_conservative {
            assert!(rate.abs() <= 1e-11 * scale, "{volume:?}: {rate} vs {scale}");
        } else {
            assert!(rate.abs() > 1e-9 * scale, "{volume:?}: {rate} vs {scale}");
        }
    }
}

#[test]
fn pointwise_gravity_does_not_conserve_total_energy() {
    let eq = Euler::theta(gas());
    let dg = Dgsem::new(warped_periodic(3), eq, FluxKit::conservative(VolumeFlux::Tec), GravityTreatment::Pointwise, smooth_potential_2d());
    let u = random_field(&eq, dg.coordinates(), 7);
    let (rate, scale) = total_energy_rate(&dg, &u);
    assert!(rate.abs() > 1e-9 * scale);
}

/// Momentum flux `mean(p) n` only.
struct PressureOnly;

impl<const D: usize> TwoPointFlux<D> for PressureOnly {
    fn volume(&self, _: &Euler, a: &PointValues<D>, b: &PointValues<D>, n: &[f64; D]) -> ConservedState<D> {
        let p = 0.5 * (a.pressure + b.pressure);
        ConservedState { rho: 0.0, momentum: n.map(|c| p * c), closure: 0.0 }
    }
}

#[test]
fn kinetic_plus_potential_energy_changes_by_pressure_work() {
    for volume in [VolumeFlux::Ec, VolumeFlux::Tec, VolumeFlux::CentralTheta, VolumeFlux::KennedyGruberEnergy] {
        for mean in [DensityMean::Arithmetic, DensityMean::Logarithmic] {
            // the gravity term must use the density mean of the mass flux
            let mass_mean = match volume {
                VolumeFlux::Ec | VolumeFlux::Tec => mean,
                _ => DensityMean::Arithmetic,
            };
            let gravity = GravityTreatment::NonConservative(NonConservativeKit::new(match mass_mean {
                DensityMean::Arithmetic => GravityMean::Arithmetic,
                DensityMean::Logarithmic => GravityMean::Logarithmic,
            }));
            let eq = Euler::new(gas(), volume.formulation());
            let kit = FluxKit::conservative(volume).with_density_mean(mean);
            let dg = Dgsem::new(warped_periodic(3), eq, kit, gravity, smooth_potential_2d());
            let u = random_field(&eq, dg.coordinates(), 8);
            let du = dg.rhs_vec(&u, 0.0).unwrap();
            let phi = dg.potential();
            let (kpe, scale) = contract(dg.weights(), &du, |i| {
                let v = u[i].velocity();
                ConservedState { rho: phi[i] - 0.5 * dot(&v, &v), momentum: v, closure: 0.0 }
            });
            let work_semi = Dgsem::new(warped_periodic(3), eq, PressureOnly, GravityTreatment::None, Geopotential::Zero);
            let dw = work_semi.rhs_vec(&u, 0.0).unwrap();
            let (work, _) = contract(work_semi.weights(), &dw, |i| ConservedState { rho: 0.0, momentum: u[i].velocity(), closure: 0.0 });
            assert!((kpe - work).abs() <= 1e-10 * scale, "{volume:?} {mean:?}: {kpe} vs {work} (scale {scale})");
        }
    }
}

fn pep_rates(kit: FluxKit, eq: Euler) -> (f64, f64, f64) {
    let grid = CartesianGrid::new([32], [0.0], [1.0], [true]).unwrap();
    let fv = FiniteVolume::new(grid, eq, kit, GravityTreatment::None, Geopotential::Zero);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (v, p) = (1.0, 1.0);
    let u: Vec<ConservedState<1>> = (0..fv.len())
        .map(|_| eq.conservative_from_primitive(&PrimitiveState::new(rng.gen_range(0.5..3.0), [v], p)).unwrap())
        .collect();
    let du = fv.rhs_vec(&u, 0.0).unwrap();
    let eps = 1e-7;
    let mut dp: f64 = 0.0;
    let mut dv: f64 = 0.0;
    for (s, r) in u.iter().zip(&du) {
        // directional derivative of pressure along the rate
        let dpi = (eq.pressure(&(*s + *r * eps)) - eq.pressure(&(*s - *r * eps))) / (2.0 * eps);
        let dvi = (r.momentum[0] - s.velocity()[0] * r.rho) / s.rho;
        dp = dp.max(dpi.abs());
        dv = dv.max(dvi.abs());
    }
    (dp, dv, p * v * 32.0)
}

#[test]
fn pressure_equilibrium_preservation() {
    let theta = Euler::theta(gas());
    for (volume, mean, preserving) in [
        (VolumeFlux::Tec, DensityMean::Logarithmic, true),
        (VolumeFlux::Tec, DensityMean::Arithmetic, true),
        (VolumeFlux::Etec, DensityMean::Logarithmic, true),
        (VolumeFlux::Ec, DensityMean::Logarithmic, true),
        (VolumeFlux::Ec, DensityMean::Arithmetic, false),
    ] {
        let (dp, dv, scale) = pep_rates(FluxKit::conservative(volume).with_density_mean(mean), theta);
        if preserving {
            assert!(dp <= 1e-12 * scale * 1e3 && dv <= 1e-12 * scale, "{volume:?} {mean:?}: {dp} {dv}");
        } else {
            assert!(dp > 1e-6 * scale, "{volume:?} {mean:?}: {dp}");
        }
    }
    let (dp, dv, scale) = pep_rates(FluxKit::conservative(VolumeFlux::RanochaEnergy), Euler::energy(gas()));
    assert!(dp <= 1e-12 * scale * 1e3 && dv <= 1e-12 * scale, "ranocha: {dp} {dv}");
}

#[test]
fn single_node_dgsem_is_finite_volumes() {
    use std::f64::consts::PI;
    let phi = Geopotential::field(|x: &[f64; 1]| ((2.0 * PI * x[0]).sin() * 1e3, [2.0 * PI * (2.0 * PI * x[0]).cos() * 1e3]));
    let gravity = GravityTreatment::NonConservative(NonConservativeKit::new(GravityMean::Stolarsky));
    for periodic in [true, false] {
        let eq = Euler::theta(gas());
        let kit = FluxKit::conservative(VolumeFlux::Tec).with_dissipation(Dissipation::Rusanov);
        let grid = CartesianGrid::new([12], [0.0], [1.0], [periodic]).unwrap();
        let fv = FiniteVolume::new(grid, eq, kit, gravity, phi.clone());
        let mesh = CurvilinearMesh::cartesian([12], SbpOperatorSet::single_node(), [0.0], [1.0], [periodic]).unwrap();
        let dg = Dgsem::new(mesh, eq, kit, gravity, phi.clone());
        let u = random_field(&eq, fv.coordinates(), 10);
        let a = fv.rhs_vec(&u, 0.0).unwrap();
        let b = dg.rhs_vec(&u, 0.0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((*x - *y).max_abs() <= 1e-12 * x.max_abs().max(1.0), "{x:?} vs {y:?}");
        }
    }
}

#[test]
fn free_stream_is_preserved_on_the_warped_mesh() {
    let eq = Euler::theta(gas());
    let u = eq.conservative_from_primitive(&PrimitiveState::new(1.1, [20.0, -10.0], 1e5)).unwrap();
    for n in [2, 3, 4] {
        let mesh = CurvilinearMesh::warped([16, 16], SbpOperatorSet::lgl(n).unwrap(), [true, true]).unwrap();
        let fs = free_stream_residual(&mesh, &eq, FluxKit::conservative(VolumeFlux::Etec).with_dissipation(Dissipation::Rusanov), u).unwrap();
        assert!(fs.residual <= 1e-12 * fs.scale, "N={n}: {fs:?}");
    }
    let mut mesh = CurvilinearMesh::warped([4, 4], SbpOperatorSet::lgl(3).unwrap(), [true, true]).unwrap();
    mesh.perturb_contravariant(21, 0, 1, 1e-3);
    let fs = free_stream_residual(&mesh, &eq, FluxKit::conservative(VolumeFlux::Etec), u).unwrap();
    assert!(fs.residual > 1e-6 * fs.scale, "{fs:?}");
}

#[test]
fn inadmissible_states_are_reported_with_their_index() {
    let eq = Euler::theta(gas());
    let grid = CartesianGrid::new([4], [0.0], [1.0], [true]).unwrap();
    let fv = FiniteVolume::new(grid, eq, FluxKit::conservative(VolumeFlux::Tec), GravityTreatment::None, Geopotential::Zero);
    let mut u = vec![ConservedState::new(1.0, [0.0], 300.0); 4];
    u[2].rho = -1.0;
    match fv.rhs_vec(&u, 0.0) {
        Err(thetaflux::EvalError::Inadmissible { index, .. }) => assert_eq!(index, 2),
        other => panic!("unexpected {other:?}"),
    }
}
