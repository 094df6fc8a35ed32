#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use thetaflux::fluxes::{tadmor_residual, DensityMean, Dissipation, FluxKit, TwoPointFlux, VolumeFlux};
use thetaflux::state::{ConservedState, EntropyKind, Euler, GasConstants, PrimitiveState};

fn euler_for(volume: VolumeFlux) -> Euler {
    Euler::new(GasConstants::dry_air(), volume.formulation())
}

fn prim() -> impl Strategy<Value = PrimitiveState<2>> {
    (0.2f64..3.0, -50.0f64..50.0, -50.0f64..50.0, 0.2f64..2.0)
        .prop_map(|(rho, u, v, p)| PrimitiveState::new(rho, [u, v], p * 1e5))
}

fn normal() -> impl Strategy<Value = [f64; 2]> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| [a, b])
}

fn kits() -> Vec<FluxKit> {
    let mut out = Vec::new();
    for volume in VolumeFlux::ALL {
        for mean in [DensityMean::Arithmetic, DensityMean::Logarithmic] {
            out.push(FluxKit::conservative(volume).with_density_mean(mean));
        }
    }
    out
}

fn close(a: &ConservedState<2>, b: &ConservedState<2>, rel: f64) -> bool {
    (*a - *b).max_abs() <= rel * a.max_abs().max(b.max_abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn symmetric_and_consistent(pl in prim(), pr in prim(), n in normal()) {
        for kit in kits() {
            let eq = euler_for(kit.volume);
            let ul = eq.conservative_from_primitive(&pl).unwrap();
            let ur = eq.conservative_from_primitive(&pr).unwrap();
            let f_lr = kit.eval(&eq, &ul, &ur, &n);
            let f_rl = kit.eval(&eq, &ur, &ul, &n);
            prop_assert!(close(&f_lr, &f_rl, 1e-14), "{:?}: {:?} vs {:?}", kit, f_lr, f_rl);
            let f_ll = kit.eval(&eq, &ul, &ul, &n);
            let exact = eq.physical_flux(&ul, &n);
            prop_assert!(close(&f_ll, &exact, 1e-13), "{:?}: {:?} vs {:?}", kit, f_ll, exact);
        }
    }

    #[test]
    fn linear_in_the_normal(pl in prim(), pr in prim(), n in normal(), s in 0.1f64..10.0) {
        for kit in kits() {
            let eq = euler_for(kit.volume);
            let ul = eq.conservative_from_primitive(&pl).unwrap();
            let ur = eq.conservative_from_primitive(&pr).unwrap();
            let scaled = kit.eval(&eq, &ul, &ur, &[s * n[0], s * n[1]]);
            let reference = kit.eval(&eq, &ul, &ur, &n) * s;
            prop_assert!(close(&scaled, &reference, 1e-13));
        }
    }

    #[test]
    fn kinetic_energy_preserving_structure(pl in prim(), pr in prim(), n in normal()) {
        for kit in kits() {
            let eq = euler_for(kit.volume);
            let ul = eq.conservative_from_primitive(&pl).unwrap();
            let ur = eq.conservative_from_primitive(&pr).unwrap();
            let f = kit.eval(&eq, &ul, &ur, &n);
            let p = 0.5 * (pl.pressure + pr.pressure);
            for d in 0..2 {
                let v = 0.5 * (pl.velocity[d] + pr.velocity[d]);
                let lhs = f.momentum[d] - f.rho * v;
                prop_assert!((lhs - p * n[d]).abs() <= 1e-13 * (f.momentum[d].abs() + p * n[d].abs()).max(1.0));
            }
        }
    }

    #[test]
    fn tadmor_conditions_hold(pl in prim(), pr in prim(), n in normal()) {
        let cases = [
            (VolumeFlux::Ec, EntropyKind::RhoS),
            (VolumeFlux::Tec, EntropyKind::RhoE),
            (VolumeFlux::Etec, EntropyKind::RhoS),
            (VolumeFlux::Etec, EntropyKind::RhoE),
            (VolumeFlux::RanochaEnergy, EntropyKind::RhoS),
        ];
        for (volume, kind) in cases {
            for mean in [DensityMean::Arithmetic, DensityMean::Logarithmic] {
                let kit = FluxKit::conservative(volume).with_density_mean(mean);
                let eq = euler_for(volume);
                let ul = eq.conservative_from_primitive(&pl).unwrap();
                let ur = eq.conservative_from_primitive(&pr).unwrap();
                let r = tadmor_residual(&eq, &kit.eval(&eq, &ul, &ur, &n), &ul, &ur, &n, kind);
                prop_assert!(r.relative() <= 1e-12, "{:?} {:?} {:?}: {:?}", volume, mean, kind, r);
            }
        }
    }

    #[test]
    fn tec_with_log_mean_is_ec_at_constant_pressure_and_velocity(
        rho_l in 0.2f64..3.0, rho_r in 0.2f64..3.0, u in -50.0f64..50.0, p in 0.2f64..2.0, n in normal()
    ) {
        let eq = Euler::theta(GasConstants::dry_air());
        let ul = eq.conservative_from_primitive(&PrimitiveState::new(rho_l, [u, -u], p * 1e5)).unwrap();
        let ur = eq.conservative_from_primitive(&PrimitiveState::new(rho_r, [u, -u], p * 1e5)).unwrap();
        let f = FluxKit::conservative(VolumeFlux::Tec).eval(&eq, &ul, &ur, &n);
        let r = tadmor_residual(&eq, &f, &ul, &ur, &n, EntropyKind::RhoS);
        prop_assert!(r.relative() <= 1e-12, "{:?}", r);
    }
}

#[test]
fn residual_vanishes_on_equal_states() {
    let eq = Euler::theta(GasConstants::dry_air());
    let u = eq.conservative_from_primitive(&PrimitiveState::new(1.1, [3.0, 4.0], 9e4)).unwrap();
    let n = [0.6, 0.8];
    for kind in [EntropyKind::RhoS, EntropyKind::RhoE] {
        let r = tadmor_residual(&eq, &FluxKit::conservative(VolumeFlux::CentralTheta).eval(&eq, &u, &u, &n), &u, &u, &n, kind);
        assert_eq!(r.value, 0.0);
    }
}

#[test]
fn non_entropy_conservative_fluxes_leave_a_residual() {
    let eq = Euler::theta(GasConstants::dry_air());
    let ul = eq.conservative_from_primitive(&PrimitiveState::new(1.0, [10.0, 0.0], 1e5)).unwrap();
    let ur = eq.conservative_from_primitive(&PrimitiveState::new(0.7, [-5.0, 2.0], 8e4)).unwrap();
    let n = [1.0, 0.0];
    let central = FluxKit::conservative(VolumeFlux::CentralTheta).eval(&eq, &ul, &ur, &n);
    assert!(tadmor_residual(&eq, &central, &ul, &ur, &n, EntropyKind::RhoS).relative() > 1e-8);
    let tec = FluxKit::conservative(VolumeFlux::Tec).with_density_mean(DensityMean::Arithmetic).eval(&eq, &ul, &ur, &n);
    assert!(tadmor_residual(&eq, &tec, &ul, &ur, &n, EntropyKind::RhoS).relative() > 1e-8);
    let ec = FluxKit::conservative(VolumeFlux::Ec).eval(&eq, &ul, &ur, &n);
    assert!(tadmor_residual(&eq, &ec, &ul, &ur, &n, EntropyKind::RhoE).relative() > 1e-8);
}

#[test]
fn ec_theta_flux_at_constant_pressure_and_velocity() {
    let eq = Euler::theta(GasConstants::dry_air());
    let ul = eq.conservative_from_primitive(&PrimitiveState::new(1.0, [2.0], 1e5)).unwrap();
    let ur = eq.conservative_from_primitive(&PrimitiveState::new(2.5, [2.0], 1e5)).unwrap();
    let f = FluxKit::conservative(VolumeFlux::Ec).eval(&eq, &ul, &ur, &[1.0]);
    assert!((f.closure - ul.closure * 2.0).abs() < 1e-12 * f.closure);
}

#[test]
fn surface_flux_defaults_to_volume_flux() {
    let eq = Euler::energy(GasConstants::dry_air());
    let ul = eq.conservative_from_primitive(&PrimitiveState::new(1.0, [2.0], 1e5)).unwrap();
    let ur = eq.conservative_from_primitive(&PrimitiveState::new(2.5, [1.0], 2e5)).unwrap();
    let kit = FluxKit::conservative(VolumeFlux::RanochaEnergy);
    let (a, b) = (eq.point_values(&ul), eq.point_values(&ur));
    assert_eq!(kit.surface(&eq, &ul, &a, &ur, &b, &[1.0]), kit.eval(&eq, &ul, &ur, &[1.0]));
}

fn theta_state(rho: f64, v: [f64; 2], p: f64) -> (Euler, ConservedState<2>) {
    let eq = Euler::theta(GasConstants::dry_air());
    let u = eq.conservative_from_primitive(&PrimitiveState::new(rho, v, p)).unwrap();
    (eq, u)
}

#[test]
fn names_round_trip() {
    for f in VolumeFlux::ALL {
        assert_eq!(VolumeFlux::from_name(f.name()), Some(f));
    }
    assert_eq!(VolumeFlux::from_name("lmars"), None);
}

#[test]
fn pressure_equilibrium_momentum_row() {
    let (eq, ul) = theta_state(1.0, [2.0, -1.0], 9e4);
    let (_, ur) = theta_state(1.7, [2.0, -1.0], 9e4);
    let n = [0.3, 0.9];
    for volume in [VolumeFlux::Tec, VolumeFlux::Ec, VolumeFlux::Etec] {
        let f = FluxKit::conservative(volume).eval(&eq, &ul, &ur, &n);
        for d in 0..2 {
            let expected = f.rho * [2.0, -1.0][d] + 9e4 * n[d];
            assert!((f.momentum[d] - expected).abs() < 1e-10 * 9e4);
        }
    }
}

#[test]
fn ec_with_log_mean_reduces_to_upwind_theta_form() {
    let (eq, ul) = theta_state(1.0, [3.0, 0.0], 1e5);
    let (_, ur) = theta_state(0.6, [3.0, 0.0], 1e5);
    let f = FluxKit::conservative(VolumeFlux::Ec).eval(&eq, &ul, &ur, &[1.0, 0.0]);
    // constant p means constant rho theta
    assert!((f.closure - ul.closure * 3.0).abs() < 1e-12 * ul.closure * 3.0);
}

#[test]
fn rusanov_is_linear_in_lambda() {
    let (eq, ul) = theta_state(1.0, [1.0, 0.0], 1e5);
    let (_, ur) = theta_state(1.3, [-2.0, 0.5], 8e4);
    let n = [1.0, 0.0];
    let kit = FluxKit::conservative(VolumeFlux::Etec).with_dissipation(Dissipation::Rusanov);
    let (a, b) = (eq.point_values(&ul), eq.point_values(&ur));
    let central = TwoPointFlux::<2>::volume(&kit, &eq, &a, &b, &n);
    let dissipated = kit.surface(&eq, &ul, &a, &ur, &b, &n);
    let lambda = kit.dissipation_speed(&eq, &a, &b, &n);
    assert!((lambda - eq.max_wave_speed(&ul, &ur, &n)).abs() < 1e-12 * lambda);
    let part = dissipated - central;
    let expected = (ur - ul) * (-0.5 * lambda);
    assert!((part - expected).max_abs() <= 1e-12 * expected.max_abs());
    let same = kit.surface(&eq, &ul, &a, &ul, &a, &n);
    assert!((same - eq.physical_flux(&ul, &n)).max_abs() < 1e-9 * 1e5);
}
