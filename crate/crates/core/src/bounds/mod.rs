//! Weighted-norm speed limits and the comparison bounds.

mod comparison;
mod qsl;
pub mod quadrature;

pub use comparison::{
    coherence, dl_bound, mt_bound_closed, projected_hs_sq, quantumness, t_c_bound, t_q_bound, DlBound,
    SchattenKind, SPECTRAL_GAP_TOLERANCE,
};
pub use qsl::{
    qsl_bound, BasisView, BoundResult, BoundSpec, Form, PoweredModuli, MAX_TIE_CANDIDATES,
    QUADRATURE_TOLERANCE, TRIVIAL_TOLERANCE,
};

use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::scalar::Real;
use crate::vectorize::Basis;

/// Eigenbasis of the Hermitian part of `x(tau) - x(0)`.
pub fn delta_diag_basis<T: Real>(traj: &Trajectory<T>) -> Result<Basis<T>> {
    Basis::eigenbasis(&traj.delta().hermitian_part(), "delta_diag")
}
