//! Gas constants, state vectors and the thermodynamic functionals of the
//! Euler equations with either potential temperature (`rho theta`) or total
//! energy (`rho E`) as the closing variable.
//!
//! States are laid out as `(rho, m_1, .., m_D, closure)`. The formulation tag
//! lives on [`Euler`] rather than on every state so that nodal arrays stay
//! plain `D + 2` doubles.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::DomainError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GasConstants {
    /// Ratio of specific heats.
    pub gamma: f64,
    /// Specific gas constant, J/(kg K).
    pub r: f64,
    /// Reference pressure of the potential temperature, Pa.
    pub p0: f64,
    /// Gravitational acceleration, m/s^2.
    pub g: f64,
    /// `p0 (R / p0)^gamma`, so that `p = K (rho theta)^gamma`.
    pub k: f64,
    pub cp: f64,
    pub cv: f64,
}

impl GasConstants {
    pub fn new(gamma: f64, r: f64, p0: f64, g: f64) -> Result<Self, DomainError> {
        if !(gamma > 1.0) {
            return Err(DomainError::GasConstants("gamma must exceed 1"));
        }
        if !(r > 0.0) {
            return Err(DomainError::GasConstants("R must be positive"));
        }
        if !(p0 > 0.0) {
            return Err(DomainError::GasConstants("p0 must be positive"));
        }
        let cv = r / (gamma - 1.0);
        Ok(Self {
            gamma,
            r,
            p0,
            g,
            k: p0 * (r / p0).powf(gamma),
            cp: cv + r,
            cv,
        })
    }

    /// Dry air: gamma = 1.4, R = 287 J/(kg K), p0 = 1e5 Pa, g = 9.81 m/s^2.
    pub fn dry_air() -> Self {
        Self::new(1.4, 287.0, 1e5, 9.81).expect("dry-air constants are valid")
    }
}

impl Default for GasConstants {
    fn default() -> Self {
        Self::dry_air()
    }
}

/// Which variable closes the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// `(rho, rho V, rho theta)`
    Theta,
    /// `(rho, rho V, rho E)`
    Energy,
}

impl Formulation {
    pub fn name(self) -> &'static str {
        match self {
            Formulation::Theta => "theta",
            Formulation::Energy => "energy",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "theta" => Some(Formulation::Theta),
            "energy" => Some(Formulation::Energy),
            _ => None,
        }
    }
}

/// Entropy functional used for entropy variables and Tadmor residuals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyKind {
    /// Thermodynamic entropy `rho s = rho ln(p / rho^gamma)`.
    RhoS,
    /// Total energy `rho E` (no potential).
    RhoE,
}

/// Conserved variables in `D` space dimensions. Also used for rates, fluxes
/// and entropy-variable covectors, which share the layout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservedState<const D: usize> {
    pub rho: f64,
    #[serde(with = "serde_arrays")]
    pub momentum: [f64; D],
    pub closure: f64,
}

// serde only derives arrays up to fixed sizes for generic const params via a helper.
mod serde_arrays {
    use serde::de::{Error, SeqAccess, Visitor};
    use serde::ser::SerializeTuple;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer, const D: usize>(v: &[f64; D], s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(D)?;
        for x in v {
            t.serialize_element(x)?;
        }
        t.end()
    }

    pub fn deserialize<'de, De: Deserializer<'de>, const D: usize>(d: De) -> Result<[f64; D], De::Error> {
        struct V<const D: usize>;
        impl<'de, const D: usize> Visitor<'de> for V<D> {
            type Value = [f64; D];
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                write!(f, "an array of {D} numbers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut out = [0.0; D];
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = seq.next_element()?.ok_or_else(|| A::Error::invalid_length(i, &self))?;
                }
                Ok(out)
            }
        }
        d.deserialize_tuple(D, V::<D>)
    }
}

impl<const D: usize> ConservedState<D> {
    pub const NVARS: usize = D + 2;

    pub const fn zero() -> Self {
        Self { rho: 0.0, momentum: [0.0; D], closure: 0.0 }
    }

    pub fn new(rho: f64, momentum: [f64; D], closure: f64) -> Self {
        Self { rho, momentum, closure }
    }

    pub fn velocity(&self) -> [f64; D] {
        let inv = 1.0 / self.rho;
        self.momentum.map(|m| m * inv)
    }

    /// Euclidean contraction, used for `omega^T f`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.rho * other.rho + dot(&self.momentum, &other.momentum) + self.closure * other.closure
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(f64::is_finite)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..Self::NVARS).map(move |i| self[i])
    }

    pub fn from_slice(values: &[f64]) -> Self {
        assert_eq!(values.len(), Self::NVARS);
        let mut s = Self::zero();
        for (i, v) in values.iter().enumerate() {
            s[i] = *v;
        }
        s
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.iter().collect()
    }

    /// Componentwise product, used to apply per-row scalings.
    pub fn hadamard(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..Self::NVARS {
            out[i] *= other[i];
        }
        out
    }
}

impl<const D: usize> Default for ConservedState<D> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const D: usize> Index<usize> for ConservedState<D> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.rho,
            i if i <= D => &self.momentum[i - 1],
            i if i == D + 1 => &self.closure,
            _ => panic!("state index {i} out of range for {D}D"),
        }
    }
}

impl<const D: usize> IndexMut<usize> for ConservedState<D> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        match i {
            0 => &mut self.rho,
            i if i <= D => &mut self.momentum[i - 1],
            i if i == D + 1 => &mut self.closure,
            _ => panic!("state index {i} out of range for {D}D"),
        }
    }
}

impl<const D: usize> Add for ConservedState<D> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const D: usize> Sub for ConservedState<D> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<const D: usize> AddAssign for ConservedState<D> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.rho += rhs.rho;
        for d in 0..D {
            self.momentum[d] += rhs.momentum[d];
        }
        self.closure += rhs.closure;
    }
}

impl<const D: usize> SubAssign for ConservedState<D> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.rho -= rhs.rho;
        for d in 0..D {
            self.momentum[d] -= rhs.momentum[d];
        }
        self.closure -= rhs.closure;
    }
}

impl<const D: usize> Mul<f64> for ConservedState<D> {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self { rho: self.rho * s, momentum: self.momentum.map(|m| m * s), closure: self.closure * s }
    }
}

impl<const D: usize> Neg for ConservedState<D> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self * -1.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimitiveState<const D: usize> {
    pub rho: f64,
    pub velocity: [f64; D],
    pub pressure: f64,
}

impl<const D: usize> PrimitiveState<D> {
    pub fn new(rho: f64, velocity: [f64; D], pressure: f64) -> Self {
        Self { rho, velocity, pressure }
    }

    pub fn is_admissible(&self) -> bool {
        self.rho > 0.0 && self.pressure > 0.0 && self.rho.is_finite() && self.pressure.is_finite()
    }
}

#[inline]
pub fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    let mut s = 0.0;
    for d in 0..D {
        s += a[d] * b[d];
    }
    s
}

#[inline]
pub fn norm<const D: usize>(a: &[f64; D]) -> f64 {
    dot(a, a).sqrt()
}

/// Values at a point that every two-point flux needs. Built once per node so
/// that the flux kernels never evaluate `powf` for the pressure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointValues<const D: usize> {
    pub rho: f64,
    pub velocity: [f64; D],
    pub pressure: f64,
    /// `rho theta` or `rho E`, depending on the formulation.
    pub closure: f64,
    /// `1 / theta = rho / (rho theta)` in theta form, `rho / p` in energy form.
    pub ratio: f64,
}

/// The Euler equations with gravity for a given closure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Euler {
    pub gas: GasConstants,
    pub formulation: Formulation,
}

impl Euler {
    pub fn new(gas: GasConstants, formulation: Formulation) -> Self {
        Self { gas, formulation }
    }

    pub fn theta(gas: GasConstants) -> Self {
        Self::new(gas, Formulation::Theta)
    }

    pub fn energy(gas: GasConstants) -> Self {
        Self::new(gas, Formulation::Energy)
    }

    /// Pressure without admissibility checks (debug assertions only).
    #[inline]
    pub fn pressure<const D: usize>(&self, u: &ConservedState<D>) -> f64 {
        debug_assert!(!(u.rho <= 0.0), "density {} not positive", u.rho);
        match self.formulation {
            Formulation::Theta => self.gas.k * u.closure.powf(self.gas.gamma),
            Formulation::Energy => {
                let ke = 0.5 * dot(&u.momentum, &u.momentum) / u.rho;
                (self.gas.gamma - 1.0) * (u.closure - ke)
            }
        }
    }

    pub fn check_admissible<const D: usize>(&self, u: &ConservedState<D>) -> Result<(), DomainError> {
        let inadmissible = |pressure| DomainError::Inadmissible { rho: u.rho, pressure };
        if !(u.rho > 0.0) || !u.is_finite() {
            return Err(inadmissible(f64::NAN));
        }
        if self.formulation == Formulation::Theta && !(u.closure > 0.0) {
            return Err(inadmissible(f64::NAN));
        }
        let p = self.pressure(u);
        if !(p > 0.0) || !p.is_finite() {
            return Err(inadmissible(p));
        }
        Ok(())
    }

    pub fn try_pressure<const D: usize>(&self, u: &ConservedState<D>) -> Result<f64, DomainError> {
        self.check_admissible(u)?;
        Ok(self.pressure(u))
    }

    #[inline]
    pub fn point_values<const D: usize>(&self, u: &ConservedState<D>) -> PointValues<D> {
        let velocity = u.velocity();
        let pressure = self.pressure(u);
        let ratio = match self.formulation {
            Formulation::Theta => u.rho / u.closure,
            Formulation::Energy => u.rho / pressure,
        };
        PointValues { rho: u.rho, velocity, pressure, closure: u.closure, ratio }
    }

    /// [`Self::point_values`] with the admissibility checks of
    /// [`Self::check_admissible`], computing the pressure only once.
    pub fn admissible_point_values<const D: usize>(&self, u: &ConservedState<D>) -> Result<PointValues<D>, DomainError> {
        if !(u.rho > 0.0) || !u.is_finite() || (self.formulation == Formulation::Theta && !(u.closure > 0.0)) {
            return Err(DomainError::Inadmissible { rho: u.rho, pressure: f64::NAN });
        }
        let pv = self.point_values(u);
        if pv.pressure > 0.0 && pv.pressure.is_finite() {
            Ok(pv)
        } else {
            Err(DomainError::Inadmissible { rho: u.rho, pressure: pv.pressure })
        }
    }

    /// `rho theta` from primitive variables: inverts `p = K (rho theta)^gamma`.
    pub fn rho_theta_from_pressure(&self, p: f64) -> f64 {
        (p / self.gas.k).powf(1.0 / self.gas.gamma)
    }

    /// Potential temperature `theta = (p0 / (R rho)) (p / p0)^(1/gamma)`.
    pub fn potential_temperature(&self, rho: f64, p: f64) -> f64 {
        self.gas.p0 / (self.gas.r * rho) * (p / self.gas.p0).powf(1.0 / self.gas.gamma)
    }

    pub fn conservative_from_primitive<const D: usize>(
        &self,
        prim: &PrimitiveState<D>,
    ) -> Result<ConservedState<D>, DomainError> {
        if !prim.is_admissible() || !prim.velocity.iter().all(|v| v.is_finite()) {
            return Err(DomainError::Inadmissible { rho: prim.rho, pressure: prim.pressure });
        }
        let momentum = prim.velocity.map(|v| prim.rho * v);
        let closure = match self.formulation {
            Formulation::Theta => self.rho_theta_from_pressure(prim.pressure),
            Formulation::Energy => {
                prim.pressure / (self.gas.gamma - 1.0) + 0.5 * prim.rho * dot(&prim.velocity, &prim.velocity)
            }
        };
        Ok(ConservedState { rho: prim.rho, momentum, closure })
    }

    pub fn primitive_from_conservative<const D: usize>(
        &self,
        u: &ConservedState<D>,
    ) -> Result<PrimitiveState<D>, DomainError> {
        let pressure = self.try_pressure(u)?;
        Ok(PrimitiveState { rho: u.rho, velocity: u.velocity(), pressure })
    }

    /// Same physical state in another formulation.
    pub fn convert<const D: usize>(
        &self,
        u: &ConservedState<D>,
        target: Formulation,
    ) -> Result<ConservedState<D>, DomainError> {
        let prim = self.primitive_from_conservative(u)?;
        Euler::new(self.gas, target).conservative_from_primitive(&prim)
    }

    /// `rho s = rho ln(p / rho^gamma)`.
    pub fn entropy_rho_s<const D: usize>(&self, u: &ConservedState<D>) -> f64 {
        let p = self.pressure(u);
        u.rho * (p.ln() - self.gas.gamma * u.rho.ln())
    }

    /// `rho E + rho phi`.
    pub fn total_energy<const D: usize>(&self, u: &ConservedState<D>, phi: f64) -> f64 {
        let rho_e = match self.formulation {
            Formulation::Theta => {
                self.gas.k * u.closure.powf(self.gas.gamma) / (self.gas.gamma - 1.0)
                    + 0.5 * dot(&u.momentum, &u.momentum) / u.rho
            }
            Formulation::Energy => u.closure,
        };
        rho_e + u.rho * phi
    }

    pub fn kinetic_energy<const D: usize>(&self, u: &ConservedState<D>) -> f64 {
        0.5 * dot(&u.momentum, &u.momentum) / u.rho
    }

    /// Gradient of the chosen entropy with respect to the conserved variables.
    pub fn entropy_variables<const D: usize>(&self, u: &ConservedState<D>, kind: EntropyKind) -> ConservedState<D> {
        let g = self.gas.gamma;
        let v = u.velocity();
        let v2 = dot(&v, &v);
        match (self.formulation, kind) {
            (Formulation::Theta, EntropyKind::RhoE) => ConservedState {
                rho: -0.5 * v2,
                momentum: v,
                closure: g / (g - 1.0) * self.gas.k * u.closure.powf(g - 1.0),
            },
            (Formulation::Theta, EntropyKind::RhoS) => {
                let p = self.pressure(u);
                ConservedState {
                    rho: p.ln() - g * u.rho.ln() - g,
                    momentum: [0.0; D],
                    closure: g * u.rho / u.closure,
                }
            }
            (Formulation::Energy, EntropyKind::RhoS) => {
                let p = self.pressure(u);
                let s = p.ln() - g * u.rho.ln();
                let beta = (g - 1.0) * u.rho / p;
                ConservedState { rho: s - g + 0.5 * beta * v2, momentum: v.map(|vi| -beta * vi), closure: beta }
            }
            (Formulation::Energy, EntropyKind::RhoE) => {
                ConservedState { rho: 0.0, momentum: [0.0; D], closure: 1.0 }
            }
        }
    }

    /// `omega(u_r) - omega(u_l)`, with logarithmic terms differenced as
    /// logarithms of ratios so that nearby states do not cancel.
    pub fn entropy_variables_jump<const D: usize>(
        &self,
        u_l: &ConservedState<D>,
        u_r: &ConservedState<D>,
        kind: EntropyKind,
    ) -> ConservedState<D> {
        let g = self.gas.gamma;
        let ln_ratio = |a: f64, b: f64| ((b - a) / a).ln_1p();
        let mut jump = self.entropy_variables(u_r, kind) - self.entropy_variables(u_l, kind);
        match (self.formulation, kind) {
            (Formulation::Theta, EntropyKind::RhoS) => {
                jump.rho = g * (ln_ratio(u_l.closure, u_r.closure) - ln_ratio(u_l.rho, u_r.rho));
            }
            (Formulation::Energy, EntropyKind::RhoS) => {
                let (pl, pr) = (self.pressure(u_l), self.pressure(u_r));
                let ds = ln_ratio(pl, pr) - g * ln_ratio(u_l.rho, u_r.rho);
                let (bl, br) = ((g - 1.0) * u_l.rho / pl, (g - 1.0) * u_r.rho / pr);
                let (vl, vr) = (u_l.velocity(), u_r.velocity());
                jump.rho = ds + 0.5 * (br * dot(&vr, &vr) - bl * dot(&vl, &vl));
            }
            (Formulation::Theta, EntropyKind::RhoE) => {
                let (vl, vr) = (u_l.velocity(), u_r.velocity());
                let dv: [f64; D] = std::array::from_fn(|d| vr[d] - vl[d]);
                let sv: [f64; D] = std::array::from_fn(|d| vr[d] + vl[d]);
                jump.rho = -0.5 * dot(&dv, &sv);
            }
            (Formulation::Energy, EntropyKind::RhoE) => {}
        }
        jump
    }

    /// Flux potential `psi = omega^T f(u) . n - F(u) . n`.
    pub fn flux_potential<const D: usize>(&self, u: &ConservedState<D>, kind: EntropyKind, normal: &[f64; D]) -> f64 {
        let vn = dot(&u.momentum, normal) / u.rho;
        match (self.formulation, kind) {
            (Formulation::Theta, EntropyKind::RhoE) => self.pressure(u) * vn,
            (Formulation::Theta, EntropyKind::RhoS) => 0.0,
            (Formulation::Energy, EntropyKind::RhoS) => -(self.gas.gamma - 1.0) * u.rho * vn,
            (Formulation::Energy, EntropyKind::RhoE) => 0.0,
        }
    }

    /// Entropy value for the chosen functional.
    pub fn entropy<const D: usize>(&self, u: &ConservedState<D>, kind: EntropyKind) -> f64 {
        match kind {
            EntropyKind::RhoS => self.entropy_rho_s(u),
            EntropyKind::RhoE => self.total_energy(u, 0.0),
        }
    }

    /// Entropy flux `F . n` for the chosen functional.
    pub fn entropy_flux<const D: usize>(&self, u: &ConservedState<D>, kind: EntropyKind, normal: &[f64; D]) -> f64 {
        let vn = dot(&u.momentum, normal) / u.rho;
        match kind {
            EntropyKind::RhoS => self.entropy_rho_s(u) * vn,
            EntropyKind::RhoE => (self.total_energy(u, 0.0) + self.pressure(u)) * vn,
        }
    }

    /// Physical flux `f(u) . n`; `normal` need not be a unit vector.
    #[inline]
    pub fn physical_flux<const D: usize>(&self, u: &ConservedState<D>, normal: &[f64; D]) -> ConservedState<D> {
        let p = self.pressure(u);
        let vn = dot(&u.momentum, normal) / u.rho;
        let mut momentum = [0.0; D];
        for d in 0..D {
            momentum[d] = u.momentum[d] * vn + p * normal[d];
        }
        let closure = match self.formulation {
            Formulation::Theta => u.closure * vn,
            Formulation::Energy => (u.closure + p) * vn,
        };
        ConservedState { rho: u.rho * vn, momentum, closure }
    }

    pub fn sound_speed<const D: usize>(&self, u: &ConservedState<D>) -> f64 {
        (self.gas.gamma * self.pressure(u) / u.rho).sqrt()
    }

    /// `max(|V . n| + c |n|)` over both states.
    pub fn max_wave_speed<const D: usize>(
        &self,
        ul: &ConservedState<D>,
        ur: &ConservedState<D>,
        normal: &[f64; D],
    ) -> f64 {
        let n = norm(normal);
        let one = |u: &ConservedState<D>| (dot(&u.momentum, normal) / u.rho).abs() + self.sound_speed(u) * n;
        one(ul).max(one(ur))
    }

    /// `max(|V . n|)` over both states, the dissipation speed of the
    /// positivity-preserving potential temperature flux.
    pub fn max_normal_velocity<const D: usize>(
        &self,
        ul: &ConservedState<D>,
        ur: &ConservedState<D>,
        normal: &[f64; D],
    ) -> f64 {
        let one = |u: &ConservedState<D>| (dot(&u.momentum, normal) / u.rho).abs();
        one(ul).max(one(ur))
    }
}
