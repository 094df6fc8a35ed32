//! Quadrature of conserved quantities, error norms and convergence orders.
//!
//! All integrals use the collocation quadrature of the discretization, the
//! inner product in which the discrete conservation statements hold.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::semidiscretization::SemiDiscretization;
use crate::state::{ConservedState, EntropyKind, Euler};

/// `sum_i w_i f(u_i, phi_i)`.
pub fn integral<const D: usize, S, F>(semi: &S, u: &[ConservedState<D>], functional: F) -> f64
where
    S: SemiDiscretization<D> + ?Sized,
    F: Fn(&Euler, &ConservedState<D>, f64) -> f64,
{
    let eq = semi.euler();
    u.iter()
        .zip(semi.weights())
        .zip(semi.potential())
        .map(|((s, w), phi)| w * functional(eq, s, *phi))
        .sum()
}

/// `sqrt(sum_i w_i (q(u_i) - q_ref(x_i))^2)` per component.
pub fn l2_error<const D: usize, const K: usize, S, Q, R>(
    semi: &S,
    u: &[ConservedState<D>],
    quantity: Q,
    reference: R,
) -> [f64; K]
where
    S: SemiDiscretization<D> + ?Sized,
    Q: Fn(&Euler, &ConservedState<D>) -> [f64; K],
    R: Fn(&[f64; D]) -> [f64; K],
{
    let eq = semi.euler();
    let mut acc = [0.0; K];
    for ((s, w), x) in u.iter().zip(semi.weights()).zip(semi.coordinates()) {
        let q = quantity(eq, s);
        let r = reference(x);
        for k in 0..K {
            acc[k] += w * (q[k] - r[k]).powi(2);
        }
    }
    acc.map(f64::sqrt)
}

/// [`l2_error`] divided by `sqrt(|Omega|)`, a root-mean-square error.
pub fn rms_error<const D: usize, const K: usize, S, Q, R>(semi: &S, u: &[ConservedState<D>], quantity: Q, reference: R) -> [f64; K]
where
    S: SemiDiscretization<D> + ?Sized,
    Q: Fn(&Euler, &ConservedState<D>) -> [f64; K],
    R: Fn(&[f64; D]) -> [f64; K],
{
    let v = semi.domain_volume().sqrt();
    l2_error(semi, u, quantity, reference).map(|e| e / v)
}

/// Velocity L2 error against a state at rest.
pub fn velocity_l2<const D: usize, S: SemiDiscretization<D> + ?Sized>(semi: &S, u: &[ConservedState<D>]) -> [f64; D] {
    l2_error(semi, u, |_, s| s.velocity(), |_| [0.0; D])
}

/// Observed orders `log(e_k / e_{k+1}) / log(h_k / h_{k+1})`; `None` where an
/// error is zero, negative or not finite.
pub fn eoc(resolutions: &[f64], errors: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(resolutions.len(), errors.len());
    resolutions
        .windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| {
            let ok = e.iter().all(|x| *x > 0.0 && x.is_finite());
            ok.then(|| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        })
        .collect()
}

/// Integrals of the conserved variables, `rho s`, `rho E` (without and with
/// potential) and the minima of density and pressure.
pub fn standard_channels<const D: usize, S: SemiDiscretization<D> + ?Sized>(
    semi: &S,
    u: &[ConservedState<D>],
) -> Vec<(String, f64)> {
    let mut out = vec![("mass".to_string(), integral(semi, u, |_, s, _| s.rho))];
    for d in 0..D {
        out.push((format!("momentum_{}", d + 1), integral(semi, u, |_, s, _| s.momentum[d])));
    }
    out.push(("closure".into(), integral(semi, u, |_, s, _| s.closure)));
    out.push(("entropy".into(), integral(semi, u, |eq, s, _| eq.entropy(s, EntropyKind::RhoS))));
    out.push(("energy".into(), integral(semi, u, |eq, s, _| eq.total_energy(s, 0.0))));
    out.push(("total_energy".into(), integral(semi, u, |eq, s, phi| eq.total_energy(s, phi))));
    let eq = semi.euler();
    let min_rho = u.iter().map(|s| s.rho).fold(f64::INFINITY, f64::min);
    let min_p = u.iter().map(|s| eq.pressure(s)).fold(f64::INFINITY, f64::min);
    out.push(("min_rho".into(), min_rho));
    out.push(("min_p".into(), min_p));
    out
}

/// Time series of named scalar channels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticSeries {
    times: Vec<f64>,
    names: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl DiagnosticSeries {
    /// Appends a record. The first record fixes the channel names; later
    /// records must use the same names in the same order.
    pub fn push(&mut self, time: f64, channels: Vec<(String, f64)>) {
        if let Some(last) = self.times.last() {
            assert!(time >= *last, "diagnostic times must be monotone");
        }
        if self.names.is_empty() && self.times.is_empty() {
            self.names = channels.iter().map(|(n, _)| n.clone()).collect();
            self.values = vec![Vec::new(); self.names.len()];
        }
        assert_eq!(channels.len(), self.names.len(), "channel count changed");
        for (k, (name, value)) in channels.into_iter().enumerate() {
            assert_eq!(name, self.names[k], "channel order changed");
            self.values[k].push(value);
        }
        self.times.push(time);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|k| self.values[k].as_slice())
    }

    /// `|Q(t) / Q(0) - 1|` for every record.
    pub fn normalized_drift(&self, name: &str) -> Option<Vec<f64>> {
        let values = self.channel(name)?;
        let first = *values.first()?;
        Some(values.iter().map(|v| (v / first - 1.0).abs()).collect())
    }

    pub fn max_normalized_drift(&self, name: &str) -> Option<f64> {
        self.normalized_drift(name).map(|d| d.into_iter().fold(0.0, f64::max))
    }

    /// Header row `time,<channels>` and one row per record, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for name in &self.names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (r, t) in self.times.iter().enumerate() {
            let _ = write!(out, "{t:.16e}");
            for column in &self.values {
                let _ = write!(out, ",{:.16e}", column[r]);
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}
