use crate::state::{ConservedState, EntropyKind, Euler};

/// Residual of Tadmor's condition `[omega]^T f - [psi]` together with the
/// magnitude it should be compared against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TadmorResidual {
    pub value: f64,
    /// `max(1, |[omega]^T f|, |[psi]|)`.
    pub scale: f64,
}

impl TadmorResidual {
    pub fn relative(&self) -> f64 {
        self.value.abs() / self.scale
    }
}

/// Tadmor residual of an already evaluated flux between `u_l` and `u_r`.
pub fn tadmor_residual<const D: usize>(
    eq: &Euler,
    flux: &ConservedState<D>,
    u_l: &ConservedState<D>,
    u_r: &ConservedState<D>,
    normal: &[f64; D],
    kind: EntropyKind,
) -> TadmorResidual {
    let d_omega = eq.entropy_variables_jump(u_l, u_r, kind);
    let d_psi = eq.flux_potential(u_r, kind, normal) - eq.flux_potential(u_l, kind, normal);
    let contraction = d_omega.dot(flux);
    TadmorResidual { value: contraction - d_psi, scale: 1f64.max(contraction.abs()).max(d_psi.abs()) }
}
