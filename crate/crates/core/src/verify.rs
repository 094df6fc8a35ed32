//! Seeded property suites behind `thetaflux verify`.
//!
//! Each suite returns named checks of the form `value <= bound` (or
//! `value > bound` for negative controls) so a report is machine readable
//! and a failure says by how much.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::averaging::{arithmetic_mean, geometric_mean, log_mean, stolarsky_mean};
use crate::config::Background;
use crate::fluxes::{tadmor_residual, DensityMean, Dissipation, FluxKit, GravityMean, NonConservativeKit, VolumeFlux};
use crate::mesh::{CartesianGrid, CurvilinearMesh};
use crate::sbp::SbpOperatorSet;
use crate::scenarios::{background, density_wave};
use crate::semidiscretization::{
    free_stream_residual, Dgsem, FiniteVolume, Geopotential, GravityTreatment, SemiDiscretization,
};
use crate::state::{ConservedState, EntropyKind, Euler, Formulation, GasConstants, PrimitiveState};
use crate::time_integration::{forward_euler_step, ssprk43_step};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Means,
    Tadmor,
    Sbp,
    Metric,
    FreeStream,
    Pep,
    Positivity,
    Balance,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Means,
        Suite::Tadmor,
        Suite::Sbp,
        Suite::Metric,
        Suite::FreeStream,
        Suite::Pep,
        Suite::Positivity,
        Suite::Balance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Means => "means",
            Suite::Tadmor => "tadmor",
            Suite::Sbp => "sbp",
            Suite::Metric => "metric",
            Suite::FreeStream => "freestream",
            Suite::Pep => "pep",
            Suite::Positivity => "positivity",
            Suite::Balance => "balance",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// `"<="` for properties, `">"` for negative controls.
    pub relation: &'static str,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, relation: "<=", passed: value <= bound }
    }

    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, relation: ">", passed: value > bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    /// The first failing check, if any.
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random state pairs per flux in the Tadmor suite.
    pub tadmor_pairs: usize,
    /// Random fields in the positivity suite.
    pub positivity_fields: usize,
    /// Forward Euler steps per positivity field.
    pub positivity_steps: usize,
    /// Time steps of the balance runs.
    pub balance_steps: usize,
    /// Negative-control mutation: evaluate the geopotential jump with the
    /// wrong sign in the balance suite.
    pub flip_gravity_jump: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 20_240_917,
            tadmor_pairs: 10_000,
            positivity_fields: 1_000,
            positivity_steps: 20,
            balance_steps: 200,
            flip_gravity_jump: false,
        }
    }
}

pub fn run_suite(suite: Suite, options: &VerifyOptions) -> SuiteReport {
    let start = Instant::now();
    let checks = match suite {
        Suite::Means => means(options),
        Suite::Tadmor => tadmor(options),
        Suite::Sbp => sbp(),
        Suite::Metric => metric(),
        Suite::FreeStream => free_stream(),
        Suite::Pep => pep(options),
        Suite::Positivity => positivity(options),
        Suite::Balance => balance(options),
    };
    SuiteReport {
        suite: suite.name().into(),
        passed: checks.iter().all(|c| c.passed),
        seconds: start.elapsed().as_secs_f64(),
        checks,
    }
}

pub fn run_all(options: &VerifyOptions) -> Vec<SuiteReport> {
    Suite::ALL.into_iter().map(|s| run_suite(s, options)).collect()
}

fn gas() -> GasConstants {
    GasConstants::dry_air()
}

/// Log-uniform positive value in `[lo, hi]`.
fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn means(options: &VerifyOptions) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let gamma = gas().gamma;
    let (mut asymmetry, mut ordering, mut near_diagonal): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..options.tadmor_pairs {
        let a = log_uniform(&mut rng, 1e-6, 1e6);
        let b = if rng.gen_bool(0.5) { a * (1.0 + rng.gen_range(-1e-3..1e-3)) } else { log_uniform(&mut rng, 1e-6, 1e6) };
        for f in [log_mean as fn(f64, f64) -> f64, |a, b| stolarsky_mean(1.4, a, b)] {
            asymmetry = asymmetry.max((f(a, b) - f(b, a)).abs());
        }
        let (g, l, s, m) = (geometric_mean(a, b), log_mean(a, b), stolarsky_mean(gamma, a, b), arithmetic_mean(a, b));
        // geometric <= log <= stolarsky <= arithmetic, up to rounding
        let tol = 4.0 * f64::EPSILON * m;
        ordering = ordering.max(g - l - tol).max(l - s - tol).max(s - m - tol);
        // second-order agreement with the arithmetic mean near the diagonal
        let z = ((b - a) / (a + b)).abs();
        if z < 1e-3 {
            near_diagonal = near_diagonal.max(((l - m) / m).abs() - z * z).max(((s - m) / m).abs() - z * z);
        }
    }
    vec![
        Check::at_most("symmetry", asymmetry, 0.0),
        Check::at_most("ordering violation", ordering.max(0.0), 0.0),
        Check::at_most("near-diagonal excess", near_diagonal.max(0.0), 1e-15),
    ]
}

/// Random admissible primitive state in `D` dimensions, in units where
/// density, pressure and velocity are of order one.
pub fn random_primitive<const D: usize>(rng: &mut ChaCha8Rng) -> PrimitiveState<D> {
    let rho = log_uniform(rng, 0.1, 10.0);
    let velocity = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let p = log_uniform(rng, 0.1, 10.0);
    PrimitiveState::new(rho, velocity, p)
}

/// Largest relative Tadmor residuals `(EC for rho s, TEC for rho E, ETEC for
/// rho s, ETEC for rho E)` over `pairs` seeded random state pairs.
pub fn tadmor_worst(pairs: usize, seed: u64) -> [f64; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eq = Euler::theta(gas());
    let kits = [
        (FluxKit::conservative(VolumeFlux::Ec), EntropyKind::RhoS),
        (FluxKit::conservative(VolumeFlux::Tec), EntropyKind::RhoE),
        (FluxKit::conservative(VolumeFlux::Etec), EntropyKind::RhoS),
        (FluxKit::conservative(VolumeFlux::Etec), EntropyKind::RhoE),
    ];
    let mut worst = [0.0f64; 4];
    for k in 0..pairs {
        let ul = eq.conservative_from_primitive(&random_primitive::<3>(&mut rng)).expect("admissible");
        let ur = if k % 4 == 0 {
            // nearly equal pairs exercise the series branches
            let mut p = eq.primitive_from_conservative(&ul).expect("admissible");
            p.rho *= 1.0 + rng.gen_range(-1e-5..1e-5);
            p.pressure *= 1.0 + rng.gen_range(-1e-5..1e-5);
            eq.conservative_from_primitive(&p).expect("admissible")
        } else {
            eq.conservative_from_primitive(&random_primitive::<3>(&mut rng)).expect("admissible")
        };
        let n: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        for (slot, (kit, kind)) in worst.iter_mut().zip(kits) {
            let f = kit.eval(&eq, &ul, &ur, &n);
            *slot = slot.max(tadmor_residual(&eq, &f, &ul, &ur, &n, kind).relative());
        }
    }
    worst
}

fn tadmor(options: &VerifyOptions) -> Vec<Check> {
    let [ec, tec, etec_s, etec_e] = tadmor_worst(options.tadmor_pairs, options.seed);
    let mut checks = vec![
        Check::at_most("ec rho s", ec, 1e-12),
        Check::at_most("tec rho e", tec, 1e-12),
        Check::at_most("etec rho s", etec_s, 1e-12),
        Check::at_most("etec rho e", etec_e, 1e-12),
    ];
    // the energy-form Ranocha flux is entropy conservative as well
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 1);
    let eq = Euler::energy(gas());
    let kit = FluxKit::conservative(VolumeFlux::RanochaEnergy);
    let mut worst = 0.0f64;
    for _ in 0..options.tadmor_pairs / 10 {
        let ul = eq.conservative_from_primitive(&random_primitive::<2>(&mut rng)).expect("admissible");
        let ur = eq.conservative_from_primitive(&random_primitive::<2>(&mut rng)).expect("admissible");
        let n = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let f = kit.eval(&eq, &ul, &ur, &n);
        worst = worst.max(tadmor_residual(&eq, &f, &ul, &ur, &n, EntropyKind::RhoS).relative());
    }
    checks.push(Check::at_most("ranocha rho s", worst, 1e-12));
    checks
}

/// Largest `|Q + Q^T - B|` over degrees `1..=max_degree`.
pub fn sbp_worst(max_degree: usize) -> f64 {
    (1..=max_degree)
        .map(|n| SbpOperatorSet::lgl(n).map(|op| op.sbp_residual()).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
}

fn sbp() -> Vec<Check> {
    let mut checks = vec![Check::at_most("Q + Q^T - B, N <= 10", sbp_worst(10), 1e-13)];
    let mut exactness = 0.0f64;
    for n in 1..=10 {
        let op = SbpOperatorSet::lgl(n).expect("valid degree");
        for k in 0..=n {
            let values: Vec<f64> = op.nodes().iter().map(|x| x.powi(k as i32)).collect();
            let derivative = op.differentiate(&values);
            for (x, d) in op.nodes().iter().zip(derivative) {
                let exact = if k == 0 { 0.0 } else { k as f64 * x.powi(k as i32 - 1) };
                exactness = exactness.max((d - exact).abs() / (k as f64).max(1.0));
            }
        }
    }
    checks.push(Check::at_most("D x^k exact for k <= N", exactness, 1e-11));
    checks
}

/// Worst relative metric identity residual on the warped 16x16 mesh over
/// degrees `1..=max_degree`.
pub fn metric_worst(max_degree: usize) -> f64 {
    (1..=max_degree)
        .map(|n| match CurvilinearMesh::warped([16, 16], SbpOperatorSet::lgl(n).expect("valid degree"), [false; 2]) {
            Ok(mesh) => {
                let (r, s) = mesh.metric_identity_residual();
                r / s
            }
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

fn metric() -> Vec<Check> {
    vec![Check::at_most("warped metric identity, N <= 6", metric_worst(6), 1e-12)]
}

/// Relative free-stream residual on the warped 16x16 mesh, worst over all
/// volume fluxes with Rusanov interfaces.
pub fn free_stream_worst(degree: usize) -> f64 {
    let mesh = match CurvilinearMesh::warped([16, 16], SbpOperatorSet::lgl(degree).expect("valid degree"), [true; 2]) {
        Ok(m) => m,
        Err(_) => return f64::INFINITY,
    };
    let mut worst = 0.0f64;
    for volume in VolumeFlux::ALL {
        let eq = Euler::new(gas(), volume.formulation());
        let state = eq
            .conservative_from_primitive(&PrimitiveState::new(1.2, [35.0, -12.0], 9.0e4))
            .expect("admissible");
        let kit = FluxKit::conservative(volume).with_dissipation(Dissipation::Rusanov);
        worst = match free_stream_residual(&mesh, &eq, kit, state) {
            Ok(fs) => worst.max(fs.residual / fs.scale),
            Err(_) => f64::INFINITY,
        };
    }
    worst
}

fn free_stream() -> Vec<Check> {
    [2, 3, 4].into_iter().map(|n| Check::at_most(format!("warped free stream, N = {n}"), free_stream_worst(n), 1e-12)).collect()
}

/// Largest `|dp/dt|` and `|dv/dt|` of the finite-volume right-hand side for
/// the density wave at `t = 0`, relative to `p |v| / dx`.
pub fn pep_rates(kit: FluxKit, formulation: Formulation, cells: usize) -> (f64, f64) {
    let eq = Euler::new(gas(), formulation);
    let grid = CartesianGrid::new([cells], [0.0], [1.0], [true]).expect("valid grid");
    let fv = FiniteVolume::new(grid, eq, kit, GravityTreatment::None, Geopotential::Zero);
    let u: Vec<ConservedState<1>> = fv
        .coordinates()
        .iter()
        .map(|x| eq.conservative_from_primitive(&density_wave(x[0], 0.0)).expect("admissible"))
        .collect();
    let du = match fv.rhs_vec(&u, 0.0) {
        Ok(du) => du,
        Err(_) => return (f64::INFINITY, f64::INFINITY),
    };
    let scale = cells as f64;
    let (mut dp, mut dv) = (0.0f64, 0.0f64);
    for (s, r) in u.iter().zip(&du) {
        // exact linearization of the pressure along the rate
        let dpdt = match formulation {
            Formulation::Theta => eq.gas.gamma * eq.pressure(s) / s.closure * r.closure,
            Formulation::Energy => {
                let v = s.momentum[0] / s.rho;
                (eq.gas.gamma - 1.0) * (r.closure - v * r.momentum[0] + 0.5 * v * v * r.rho)
            }
        };
        dp = dp.max(dpdt.abs() / scale);
        dv = dv.max(((r.momentum[0] - s.velocity()[0] * r.rho) / s.rho).abs() / scale);
    }
    (dp, dv)
}

fn pep(_: &VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let cases = [
        ("tec log", FluxKit::conservative(VolumeFlux::Tec), Formulation::Theta),
        ("tec arithmetic", FluxKit::conservative(VolumeFlux::Tec).with_density_mean(DensityMean::Arithmetic), Formulation::Theta),
        ("etec", FluxKit::conservative(VolumeFlux::Etec), Formulation::Theta),
        ("ec log", FluxKit::conservative(VolumeFlux::Ec), Formulation::Theta),
        ("ranocha", FluxKit::conservative(VolumeFlux::RanochaEnergy), Formulation::Energy),
    ];
    for (name, kit, formulation) in cases {
        let (dp, dv) = pep_rates(kit, formulation, 64);
        checks.push(Check::at_most(format!("{name} dp/dt"), dp, 1e-12));
        checks.push(Check::at_most(format!("{name} dv/dt"), dv, 1e-12));
    }
    let (dp, _) = pep_rates(FluxKit::conservative(VolumeFlux::Ec).with_density_mean(DensityMean::Arithmetic), Formulation::Theta, 64);
    checks.push(Check::above("ec arithmetic dp/dt (control)", dp, 1e-6));
    checks
}

/// Smallest `rho theta` seen over `fields` random near-vacuum fields, each
/// advanced `steps` forward Euler steps of first-order finite volumes with
/// the velocity-scaled TEC flux at `dt = dx / (2 max|v|)`. A failed
/// evaluation counts as `-inf`.
pub fn positivity_min(fields: usize, steps: usize, seed: u64) -> f64 {
    let eq = Euler::theta(gas());
    let cells = 64;
    let grid = CartesianGrid::new([cells], [0.0], [1.0], [true]).expect("valid grid");
    let dx = grid.spacing()[0];
    let kit = FluxKit::conservative(VolumeFlux::Tec).with_dissipation(Dissipation::VelocityScaled);
    let fv = FiniteVolume::new(grid, eq, kit, GravityTreatment::None, Geopotential::Zero);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min = f64::INFINITY;
    for _ in 0..fields {
        let mut u: Vec<ConservedState<1>> = (0..cells)
            .map(|_| {
                let rho = rng.gen_range(0.5..2.0);
                let v = rng.gen_range(-50.0..50.0);
                let rho_theta = if rng.gen_bool(0.3) { log_uniform(&mut rng, 1e-14, 1e-8) } else { log_uniform(&mut rng, 1e-3, 3e2) };
                ConservedState::new(rho, [rho * v], rho_theta)
            })
            .collect();
        for _ in 0..steps {
            let lambda = u.iter().map(|s| (s.momentum[0] / s.rho).abs()).fold(0.0, f64::max);
            let dt = dx / (2.0 * lambda);
            if forward_euler_step(&mut u, 0.0, dt, |v, t, dv| fv.rhs(v, t, dv)).is_err() {
                return f64::NEG_INFINITY;
            }
            min = u.iter().map(|s| s.closure).fold(min, f64::min);
        }
    }
    min
}

fn positivity(options: &VerifyOptions) -> Vec<Check> {
    let min = positivity_min(options.positivity_fields, options.positivity_steps, options.seed);
    vec![Check::at_most("negated min rho theta", -min, 0.0)]
}

/// The hydrostatic `background` on the warped `16 x 16` mesh of degree 2
/// with slip walls.
fn balance_setup(
    formulation: Formulation,
    kind: Background,
    kit: NonConservativeKit,
) -> (Dgsem<2, FluxKit>, Vec<ConservedState<2>>) {
    let eq = Euler::new(gas(), formulation);
    let volume = match formulation {
        Formulation::Theta => VolumeFlux::Etec,
        Formulation::Energy => VolumeFlux::RanochaEnergy,
    };
    let mesh = CurvilinearMesh::warped([16, 16], SbpOperatorSet::lgl(2).expect("valid degree"), [false; 2]).expect("valid mesh");
    let semi = Dgsem::new(
        mesh,
        eq,
        FluxKit::conservative(volume).with_dissipation(Dissipation::Rusanov),
        GravityTreatment::NonConservative(kit),
        Geopotential::Linear { g: eq.gas.g, axis: 1 },
    );
    let u = semi
        .coordinates()
        .iter()
        .zip(semi.potential())
        .map(|(_, phi)| {
            let (rho, p) = background(&eq.gas, kind, *phi).expect("inside the atmosphere");
            eq.conservative_from_primitive(&PrimitiveState::new(rho, [0.0; 2], p)).expect("admissible")
        })
        .collect();
    (semi, u)
}

/// Largest momentum rate of a hydrostatic background relative to the
/// largest pressure flux-difference term `sum_d |Ja^d| p / J`, and the
/// velocity RMS after `steps` SSPRK43 steps of `dt = 0.01`.
pub fn balance_errors(formulation: Formulation, kind: Background, kit: NonConservativeKit, steps: usize) -> (f64, f64) {
    let (semi, mut u) = balance_setup(formulation, kind, kit);
    let eq = *semi.euler();
    let mesh = semi.mesh();
    let scale = u
        .iter()
        .zip(mesh.contravariant().iter().zip(mesh.jacobian()))
        .map(|(s, (ja, j))| ja.iter().map(crate::state::norm).sum::<f64>() * eq.pressure(s) / j)
        .fold(0.0, f64::max);
    let rate = match semi.rhs_vec(&u, 0.0) {
        Ok(du) => du.iter().map(|r| r.momentum[0].abs().max(r.momentum[1].abs())).fold(0.0, f64::max) / scale,
        Err(_) => return (f64::INFINITY, f64::INFINITY),
    };
    let mut t = 0.0;
    for _ in 0..steps {
        if ssprk43_step(&mut u, t, 0.01, |v, s, dv| semi.rhs(v, s, dv)).is_err() {
            return (rate, f64::INFINITY);
        }
        t += 0.01;
    }
    let [vx, vy] = crate::diagnostics::rms_error(&semi, &u, |_, s| s.velocity(), |_| [0.0; 2]);
    (rate, vx.hypot(vy))
}

fn balance(options: &VerifyOptions) -> Vec<Check> {
    let mutate = |kit: NonConservativeKit| if options.flip_gravity_jump { kit.with_flipped_jump() } else { kit };
    let mut checks = Vec::new();
    for formulation in [Formulation::Theta, Formulation::Energy] {
        for (kind, mean) in [(Background::Isothermal, GravityMean::Logarithmic), (Background::Adiabatic, GravityMean::Stolarsky)] {
            let (rate, velocity) = balance_errors(formulation, kind, mutate(NonConservativeKit::new(mean)), options.balance_steps);
            let label = format!("{} {} + {}", formulation.name(), kind.name(), mean.name());
            checks.push(Check::at_most(format!("{label} momentum rate"), rate, 1e-12));
            checks.push(Check::at_most(format!("{label} velocity rms"), velocity, 1e-10));
        }
    }
    let (rate, _) = balance_errors(Formulation::Theta, Background::Isothermal, NonConservativeKit::new(GravityMean::Stolarsky), 0);
    checks.push(Check::above("theta isothermal + stolarsky momentum rate (control)", rate, 1e-9));
    checks
}
