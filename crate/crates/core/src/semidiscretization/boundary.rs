use crate::state::{dot, ConservedState};

/// Mirror state for a slip wall with (not necessarily unit) normal `normal`:
/// the normal momentum changes sign, density and closure are copied.
#[inline]
pub fn slip_wall_ghost<const D: usize>(u: &ConservedState<D>, normal: &[f64; D]) -> ConservedState<D> {
    let nn = dot(normal, normal);
    if nn == 0.0 {
        return *u;
    }
    let mn = dot(&u.momentum, normal) / nn;
    let mut ghost = *u;
    for d in 0..D {
        ghost.momentum[d] -= 2.0 * mn * normal[d];
    }
    ghost
}
