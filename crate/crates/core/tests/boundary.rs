use thetaflux::semidiscretization::slip_wall_ghost;
use thetaflux::state::ConservedState;

#[test]
fn tangential_state_is_unchanged() {
    let u = ConservedState::new(1.0, [3.0, 0.0], 2.0);
    assert_eq!(slip_wall_ghost(&u, &[0.0, 2.0]), u);
}

#[test]
fn only_normal_momentum_flips() {
    let u = ConservedState::new(1.2, [3.0, -4.0], 2.0);
    let g = slip_wall_ghost(&u, &[0.0, 0.5]);
    assert_eq!(g, ConservedState::new(1.2, [3.0, 4.0], 2.0));
    let g = slip_wall_ghost(&u, &[0.6, 0.8]);
    // m.n = -1.4 for the unit normal
    assert!((g.momentum[0] - (3.0 + 2.0 * 1.4 * 0.6)).abs() < 1e-14);
    assert!((g.momentum[1] - (-4.0 + 2.0 * 1.4 * 0.8)).abs() < 1e-14);
    assert_eq!(slip_wall_ghost(&g, &[0.6, 0.8]).momentum.map(|m| (m * 1e12).round()), u.momentum.map(|m| (m * 1e12).round()));
}
