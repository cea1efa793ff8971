//! Reference speed limits the weighted-norm bounds are compared against.

use std::fmt;

use crate::dynamics::{Picture, Trajectory};
use crate::error::{QslError, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;
use crate::spectral::{hermitian_eig, schatten_norms, sqrt_psd};
use crate::states::{bures_angle, energy_stddev};

use super::quadrature::{derivative_nodes, QuadratureRule};

/// Relative gap below which two eigenvalues of an observable count as equal.
pub const SPECTRAL_GAP_TOLERANCE: f64 = 1e-10;

/// Mean of node values over the trajectory duration.
fn time_average<T: Real>(traj: &Trajectory<T>, values: &[T]) -> T {
    QuadratureRule::for_trajectory(traj).integrate(values).value / traj.tau()
}

fn ratio<T: Real>(numerator: T, denominator: T) -> Result<T> {
    if numerator == T::zero() {
        return Ok(T::zero());
    }
    if denominator <= T::zero() {
        return Err(QslError::ZeroDenominator {
            numerator: numerator.to_f64_lossy(),
        });
    }
    Ok(numerator / denominator)
}

/// `hbar * Theta(rho_0, rho_tau) / <Delta E>` for the trajectory's Hamiltonian.
pub fn mt_bound_closed<T: Real>(traj: &Trajectory<T>) -> Result<T> {
    traj.check_states()?;
    let gen = traj.generator();
    let k = traj.len();
    let times = traj.times();
    let mut spreads = Vec::with_capacity(k + traj.breaks().len());
    for (&t, rho) in times.iter().zip(traj.samples()) {
        spreads.push(energy_stddev(rho, &gen.hamiltonian.at(t))?);
    }
    for b in traj.breaks() {
        let t = times[b.index];
        spreads.push(energy_stddev(&traj.samples()[b.index], &gen.hamiltonian.left_limit(t))?);
    }
    let theta = bures_angle(traj.initial(), traj.last())?;
    ratio(gen.hbar * theta, time_average(traj, &spreads))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchattenKind {
    Op,
    Tr,
    Hs,
}

impl fmt::Display for SchattenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchattenKind::Op => "op",
            SchattenKind::Tr => "tr",
            SchattenKind::Hs => "hs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlBound<T> {
    pub value: T,
    pub winning_norm: SchattenKind,
    /// `sin^2 Theta / Lambda_hs`.
    pub mt_open: T,
    pub lambda_op: T,
    pub lambda_tr: T,
    pub lambda_hs: T,
}

/// `max(1/Lambda_op, 1/Lambda_tr, 1/Lambda_hs) sin^2 Theta` with the
/// Lambdas the time-averaged Schatten norms of the generator output.
pub fn dl_bound<T: Real>(traj: &Trajectory<T>) -> Result<DlBound<T>> {
    traj.check_states()?;
    let nodes = derivative_nodes(traj);
    let mut op = Vec::with_capacity(nodes.len());
    let mut tr = Vec::with_capacity(nodes.len());
    let mut hs = Vec::with_capacity(nodes.len());
    for d in nodes {
        let s = schatten_norms(d);
        op.push(s.op);
        tr.push(s.tr);
        hs.push(s.hs);
    }
    let lambda_op = time_average(traj, &op);
    let lambda_tr = time_average(traj, &tr);
    let lambda_hs = time_average(traj, &hs);
    let theta = bures_angle(traj.initial(), traj.last())?;
    let s2 = theta.sin().powi(2);
    let candidates = [
        (SchattenKind::Op, lambda_op),
        (SchattenKind::Tr, lambda_tr),
        (SchattenKind::Hs, lambda_hs),
    ];
    // smallest Lambda wins; ties keep the earlier norm
    let (winning_norm, lambda_min) = candidates
        .iter()
        .copied()
        .fold(candidates[0], |best, c| if c.1 < best.1 { c } else { best });
    Ok(DlBound {
        value: ratio(s2, lambda_min)?,
        winning_norm,
        mt_open: ratio(s2, lambda_hs)?,
        lambda_op,
        lambda_tr,
        lambda_hs,
    })
}

/// `Q = 2 ||[A_0, A_t]||_hs^2`.
pub fn quantumness<T: Real>(a0: &ComplexMatrix<T>, at: &ComplexMatrix<T>) -> Result<T> {
    a0.check_same_dim(at)?;
    Ok(T::lit(2.0) * a0.commutator(at).frobenius_norm_sq())
}

/// `sqrt(Q(A_0, A_T)) / sqrt(2 <||[A_0, L^dagger(A_t)]||_hs>)` for an
/// observable trajectory whose derivatives are the adjoint generator output.
pub fn t_q_bound<T: Real>(traj: &Trajectory<T>, a0: &ComplexMatrix<T>) -> Result<T> {
    if traj.generator().picture != Picture::Heisenberg {
        return Err(QslError::InvalidTrajectory("expected an observable (Heisenberg-picture) trajectory".into()));
    }
    a0.check_same_dim(traj.initial())?;
    let q = quantumness(a0, traj.last())?;
    let values: Vec<T> = derivative_nodes(traj)
        .into_iter()
        .map(|d| a0.commutator(d).frobenius_norm())
        .collect();
    let mean = time_average(traj, &values);
    ratio(q.sqrt(), (T::lit(2.0) * mean).sqrt())
}

/// Eigenprojectors of a Hermitian observable with simple spectrum.
fn eigenbasis_checked<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eig(a)?;
    let scale = eig.values.iter().fold(T::zero(), |m, v| m.max(v.abs())).max(T::one());
    for w in eig.values.windows(2) {
        let gap = w[0] - w[1];
        if gap <= T::lit(SPECTRAL_GAP_TOLERANCE) * scale {
            return Err(QslError::DegenerateSpectrum { gap: gap.to_f64_lossy() });
        }
    }
    Ok(eig.vectors)
}

/// l1 coherence of `rho` in the eigenbasis of `a`: the sum of the moduli of
/// the off-diagonal entries.
pub fn coherence<T: Real>(rho: &ComplexMatrix<T>, a: &ComplexMatrix<T>) -> Result<T> {
    rho.check_same_dim(a)?;
    crate::spectral::check_density(rho)?;
    let v = eigenbasis_checked(a)?;
    let r = rho.in_basis(&v);
    let n = r.dim();
    let mut c = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                c = c + r[(i, j)].norm();
            }
        }
    }
    Ok(c)
}

/// `sum_k ||M P_k||_hs^2` over the rank-one projectors onto the columns of `v`.
pub fn projected_hs_sq<T: Real>(m: &ComplexMatrix<T>, v: &ComplexMatrix<T>) -> T {
    (0..v.dim())
        .map(|k| {
            let col = v.column(k);
            let p = ComplexMatrix::projector(&col);
            (m * &p).frobenius_norm_sq()
        })
        .sum()
}

/// First-derivative weights at `x[at]` from three points (non-uniform allowed).
fn three_point_derivative<T: Real>(x: [T; 3], at: usize) -> [T; 3] {
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    let xs = x[at];
    [
        ((xs - x1) + (xs - x2)) / ((x0 - x1) * (x0 - x2)),
        ((xs - x0) + (xs - x2)) / ((x1 - x0) * (x1 - x2)),
        ((xs - x0) + (xs - x1)) / ((x2 - x0) * (x2 - x1)),
    ]
}

/// `sqrt 2 |sqrt C(rho_0) - sqrt C(rho_T)| / <||d/dt sqrt(rho_t)||_hs>` with
/// the derivative of the square root taken by finite differences along the grid.
pub fn t_c_bound<T: Real>(traj: &Trajectory<T>, a: &ComplexMatrix<T>) -> Result<T> {
    traj.check_states()?;
    let v = eigenbasis_checked(a)?;
    let c0 = coherence(traj.initial(), a)?;
    let ct = coherence(traj.last(), a)?;
    let numerator = T::lit(2.0).sqrt() * (c0.sqrt() - ct.sqrt()).abs();

    let times = traj.times();
    let roots = traj.samples().iter().map(sqrt_psd).collect::<Result<Vec<_>>>()?;
    let k = traj.len();
    let mut values = vec![T::zero(); k + traj.breaks().len()];
    let mut checked = false;
    for (a_idx, b_idx) in traj.segments() {
        if b_idx - a_idx < 2 {
            return Err(QslError::InvalidTrajectory(
                "finite differences need at least two intervals per smooth segment".into(),
            ));
        }
        for i in a_idx..=b_idx {
            let (lo, at) = if i == a_idx {
                (a_idx, 0)
            } else if i == b_idx {
                (b_idx - 2, 2)
            } else {
                (i - 1, 1)
            };
            let w = three_point_derivative([times[lo], times[lo + 1], times[lo + 2]], at);
            let mut d = roots[lo].scale_real(w[0]);
            d.add_scaled(w[1].into(), &roots[lo + 1]);
            d.add_scaled(w[2].into(), &roots[lo + 2]);
            if !checked {
                let full = d.frobenius_norm_sq();
                let split = projected_hs_sq(&d, &v);
                if (full - split).abs() > T::tol(1e-10) * full.max(T::one()) {
                    return Err(QslError::InvalidTrajectory(
                        "projector decomposition of the Hilbert-Schmidt norm failed".into(),
                    ));
                }
                checked = true;
            }
            let node = if i == b_idx {
                traj.breaks()
                    .iter()
                    .position(|br| br.index == i)
                    .map(|j| k + j)
                    .unwrap_or(i)
            } else {
                i
            };
            values[node] = d.frobenius_norm();
        }
    }
    ratio(numerator, time_average(traj, &values))
}
