//! Explicit SSP Runge-Kutta time stepping.

use std::ops::{Add, Mul, Sub};

use crate::diagnostics::{standard_channels, DiagnosticSeries};
use crate::error::EvalError;
use crate::semidiscretization::SemiDiscretization;
use crate::state::ConservedState;

/// Stage times of SSPRK43 relative to the step start, in units of `dt`.
const STAGE_OFFSETS: [f64; 4] = [0.0, 0.5, 1.0, 0.5];

fn stage_error(stage: usize, time: f64, source: EvalError) -> EvalError {
    EvalError::Stage { stage, time, source: Box::new(source) }
}

/// One step of the four-stage, third-order SSP Runge-Kutta method
///
/// ```text
/// u1 = u + dt/2 f(u)
/// u2 = u1 + dt/2 f(u1)
/// u3 = 2/3 u + 1/3 (u2 + dt/2 f(u2))
/// u+ = u3 + dt/2 f(u3)
/// ```
///
/// The third stage is evaluated as `u + (v - u) / 3`: the rounded weights
/// `2/3` and `1/3` sum to less than one, which would shrink the state by a
/// few ulps every step.
///
/// `rhs(u, t, du)` writes `f(u)` into `du`.
pub fn ssprk43_step<T, F>(u: &mut [T], t: f64, dt: f64, mut rhs: F) -> Result<(), EvalError>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: FnMut(&[T], f64, &mut [T]) -> Result<(), EvalError>,
{
    let h = 0.5 * dt;
    let mut k = u.to_vec();
    let mut stage = u.to_vec();

    rhs(u, t, &mut k).map_err(|e| stage_error(1, t, e))?;
    for (s, (&ui, &ki)) in stage.iter_mut().zip(u.iter().zip(&k)) {
        *s = ui + ki * h;
    }
    let t1 = t + STAGE_OFFSETS[1] * dt;
    rhs(&stage, t1, &mut k).map_err(|e| stage_error(2, t1, e))?;
    for (s, &ki) in stage.iter_mut().zip(&k) {
        *s = *s + ki * h;
    }
    let t2 = t + STAGE_OFFSETS[2] * dt;
    rhs(&stage, t2, &mut k).map_err(|e| stage_error(3, t2, e))?;
    for (s, (&ui, &ki)) in stage.iter_mut().zip(u.iter().zip(&k)) {
        *s = ui + (*s + ki * h - ui) * (1.0 / 3.0);
    }
    let t3 = t + STAGE_OFFSETS[3] * dt;
    rhs(&stage, t3, &mut k).map_err(|e| stage_error(4, t3, e))?;
    for (ui, (&si, &ki)) in u.iter_mut().zip(stage.iter().zip(&k)) {
        *ui = si + ki * h;
    }
    Ok(())
}

/// `u += dt f(u)`.
pub fn forward_euler_step<T, F>(u: &mut [T], t: f64, dt: f64, mut rhs: F) -> Result<(), EvalError>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    F: FnMut(&[T], f64, &mut [T]) -> Result<(), EvalError>,
{
    let mut k = u.to_vec();
    rhs(u, t, &mut k).map_err(|e| stage_error(1, t, e))?;
    for (ui, &ki) in u.iter_mut().zip(&k) {
        *ui = *ui + ki * dt;
    }
    Ok(())
}

/// Stability polynomial of SSPRK43, `R(z) = 1 + z + z^2/2 + z^3/6 + z^4/48`.
pub fn ssprk43_stability(z: f64) -> f64 {
    1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 48.0)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepControl {
    /// `dt = cfl * max_dt`, recomputed every step.
    Cfl(f64),
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeLoopConfig {
    pub end_time: f64,
    pub step: StepControl,
    /// Record diagnostics every this many steps (and always at start and end);
    /// 0 records only start and end.
    pub diagnostics_every: usize,
}

impl TimeLoopConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.end_time >= 0.0) || !self.end_time.is_finite() {
            return Err(format!("end time must be finite and non-negative, got {}", self.end_time));
        }
        match self.step {
            StepControl::Cfl(c) if !(c > 0.0) => Err(format!("CFL number must be positive, got {c}")),
            StepControl::Fixed(dt) if !(dt > 0.0) => Err(format!("time step must be positive, got {dt}")),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome<const D: usize> {
    pub state: Vec<ConservedState<D>>,
    pub time: f64,
    pub steps: usize,
    pub series: DiagnosticSeries,
}

/// Advances `u0` to `config.end_time`, recording the standard channels plus
/// whatever `extra` returns at every record.
pub fn run_with<const D: usize, S, X>(
    semi: &S,
    u0: Vec<ConservedState<D>>,
    config: &TimeLoopConfig,
    mut extra: X,
) -> Result<RunOutcome<D>, EvalError>
where
    S: SemiDiscretization<D> + ?Sized,
    X: FnMut(f64, &[ConservedState<D>]) -> Vec<(String, f64)>,
{
    let mut u = u0;
    let mut t = 0.0;
    let mut steps = 0;
    let mut series = DiagnosticSeries::default();
    let mut record = |t: f64, u: &[ConservedState<D>], series: &mut DiagnosticSeries| {
        let mut channels = standard_channels(semi, u);
        channels.extend(extra(t, u));
        series.push(t, channels);
    };
    record(t, &u, &mut series);
    let end = config.end_time;
    while t < end {
        let mut dt = match config.step {
            StepControl::Cfl(cfl) => semi.max_dt(&u, cfl),
            StepControl::Fixed(dt) => dt,
        };
        let last = t + dt >= end - 1e-10 * dt;
        if last {
            dt = end - t;
        }
        ssprk43_step(&mut u, t, dt, |v, s, dv| semi.rhs(v, s, dv))?;
        steps += 1;
        t = if last { end } else { t + dt };
        if let Some(index) = u.iter().position(|s| !s.is_finite()) {
            return Err(EvalError::NonFinite { index, time: t });
        }
        if last || (config.diagnostics_every > 0 && steps % config.diagnostics_every == 0) {
            record(t, &u, &mut series);
        }
    }
    Ok(RunOutcome { state: u, time: t, steps, series })
}

/// [`run_with`] recording only the standard channels.
pub fn run<const D: usize, S: SemiDiscretization<D> + ?Sized>(
    semi: &S,
    u0: Vec<ConservedState<D>>,
    config: &TimeLoopConfig,
) -> Result<RunOutcome<D>, EvalError> {
    run_with(semi, u0, config, |_, _| Vec::new())
}
