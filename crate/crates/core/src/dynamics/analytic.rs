use std::collections::BTreeMap;

use crate::error::{QslError, Result};
use crate::matrix::{pauli, ComplexMatrix};
use crate::scalar::{cplx, creal, Real, C};

use super::generator::{GeneratorSpec, Hamiltonian, Picture, SuperOperator};
use super::trajectory::{Source, Trajectory};

pub const MIN_ANALYTIC_GRID: usize = 64;

/// Closed-form model trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticModel<T> {
    /// Qubit decaying from `(|0> + |1>)/sqrt 2` with `L = |0><1|` at rate `gamma`.
    SpontaneousEmission { gamma: T },
    /// Observable `A_0 = sigma_y` in the Heisenberg picture under `H = sigma_x` with dephasing.
    DephasingObservable { gamma: T },
    /// State `|0><0|` under `H = sigma_x` with dephasing.
    CoherenceState { gamma: T },
    /// `(|E_0> + |E_1>)/sqrt 2` under `H = diag(0, 1)`.
    QubitTimeIndependent { hbar: T },
    /// Four-level state under `H = diag(0, 1, pi, 4)`.
    Qudit4 { hbar: T },
}

/// Amplitudes and energies of the four-level model.
pub const QUDIT4_WEIGHTS: [f64; 4] = [0.2, 0.4, 0.3, 0.1];
pub const QUDIT4_ENERGIES: [f64; 4] = [0.0, 1.0, std::f64::consts::PI, 4.0];

impl<T: Real> AnalyticModel<T> {
    pub const NAMES: [&'static str; 5] = [
        "spontaneous_emission",
        "dephasing_observable",
        "coherence_state",
        "qubit_time_independent",
        "qudit4",
    ];

    /// Looks up a model by id; `gamma` and `hbar` default to 1.
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str| -> Result<T> {
            let v = params.get(key).copied().unwrap_or(1.0);
            if !v.is_finite() {
                return Err(QslError::Config(format!("parameter {key} must be finite")));
            }
            Ok(T::lit(v))
        };
        Ok(match name {
            "spontaneous_emission" => AnalyticModel::SpontaneousEmission { gamma: get("gamma")? },
            "dephasing_observable" => AnalyticModel::DephasingObservable { gamma: get("gamma")? },
            "coherence_state" => AnalyticModel::CoherenceState { gamma: get("gamma")? },
            "qubit_time_independent" => AnalyticModel::QubitTimeIndependent { hbar: get("hbar")? },
            "qudit4" => AnalyticModel::Qudit4 { hbar: get("hbar")? },
            other => return Err(QslError::UnknownScenario(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            AnalyticModel::SpontaneousEmission { .. } => Self::NAMES[0],
            AnalyticModel::DephasingObservable { .. } => Self::NAMES[1],
            AnalyticModel::CoherenceState { .. } => Self::NAMES[2],
            AnalyticModel::QubitTimeIndependent { .. } => Self::NAMES[3],
            AnalyticModel::Qudit4 { .. } => Self::NAMES[4],
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            AnalyticModel::SpontaneousEmission { gamma }
            | AnalyticModel::DephasingObservable { gamma }
            | AnalyticModel::CoherenceState { gamma } => {
                if !(gamma >= T::zero() && gamma.is_finite()) {
                    return Err(QslError::Config(format!("gamma must be finite and >= 0, got {gamma}")));
                }
            }
            AnalyticModel::QubitTimeIndependent { hbar } | AnalyticModel::Qudit4 { hbar } => {
                if !(hbar > T::zero() && hbar.is_finite()) {
                    return Err(QslError::Config(format!("hbar must be finite and > 0, got {hbar}")));
                }
            }
        }
        Ok(())
    }

    /// The generator whose flow is the closed form.
    pub fn generator(&self) -> GeneratorSpec<T> {
        match *self {
            AnalyticModel::SpontaneousEmission { gamma } => spontaneous_emission_generator(gamma),
            AnalyticModel::DephasingObservable { gamma } => {
                dephasing_generator(gamma).with_picture(Picture::Heisenberg)
            }
            AnalyticModel::CoherenceState { gamma } => dephasing_generator(gamma),
            AnalyticModel::QubitTimeIndependent { hbar } => {
                GeneratorSpec::closed(ComplexMatrix::diag_real(&[T::zero(), T::one()])).with_hbar(hbar)
            }
            AnalyticModel::Qudit4 { hbar } => {
                let e: Vec<T> = QUDIT4_ENERGIES.iter().map(|&x| T::lit(x)).collect();
                GeneratorSpec::closed(ComplexMatrix::diag_real(&e)).with_hbar(hbar)
            }
        }
    }

    /// The closed-form operator at time `t`.
    pub fn sample(&self, t: T) -> ComplexMatrix<T> {
        let half = T::lit(0.5);
        match *self {
            AnalyticModel::SpontaneousEmission { gamma } => {
                let e = (-gamma * t).exp();
                let c = (-gamma * t * half).exp() * half;
                ComplexMatrix::from_rows(vec![
                    vec![creal(T::one() - e * half), creal(c)],
                    vec![creal(c), creal(e * half)],
                ])
                .expect("2x2")
            }
            AnalyticModel::DephasingObservable { gamma } => {
                let two_t = t * T::lit(2.0);
                let (s, c) = (two_t.sin(), two_t.cos());
                let e = (-gamma * t * half).exp();
                let off = (gamma * T::lit(0.25) * s - c) * e;
                ComplexMatrix::from_rows(vec![
                    vec![creal(-s * e), cplx(T::zero(), off)],
                    vec![cplx(T::zero(), -off), creal(s * e)],
                ])
                .expect("2x2")
            }
            AnalyticModel::CoherenceState { gamma } => {
                let two_t = t * T::lit(2.0);
                let (s, c) = (two_t.sin(), two_t.cos());
                let e = (-gamma * t * half).exp();
                let d = (c * half + gamma * T::lit(0.125) * s) * e;
                let off = s * half * e;
                ComplexMatrix::from_rows(vec![
                    vec![creal(half + d), cplx(T::zero(), off)],
                    vec![cplx(T::zero(), -off), creal(half - d)],
                ])
                .expect("2x2")
            }
            AnalyticModel::QubitTimeIndependent { hbar } => {
                let amp = [T::lit(0.5).sqrt(), T::lit(0.5).sqrt()];
                let energies = [T::zero(), T::one()];
                ComplexMatrix::projector(&evolve_amplitudes(&amp, &energies, t, hbar))
            }
            AnalyticModel::Qudit4 { hbar } => {
                let amp: Vec<T> = QUDIT4_WEIGHTS.iter().map(|&x| T::lit(x).sqrt()).collect();
                let energies: Vec<T> = QUDIT4_ENERGIES.iter().map(|&x| T::lit(x)).collect();
                ComplexMatrix::projector(&evolve_amplitudes(&amp, &energies, t, hbar))
            }
        }
    }
}

fn evolve_amplitudes<T: Real>(amp: &[T], energies: &[T], t: T, hbar: T) -> Vec<C<T>> {
    amp.iter()
        .zip(energies)
        .map(|(&a, &e)| {
            let phase = -e * t / hbar;
            cplx(a * phase.cos(), a * phase.sin())
        })
        .collect()
}

/// `L = |0><1|` at rate `gamma`, no Hamiltonian.
pub fn spontaneous_emission_generator<T: Real>(gamma: T) -> GeneratorSpec<T> {
    let lowering = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).expect("2x2");
    GeneratorSpec::new(Hamiltonian::zero(2), Picture::Schrodinger).with_jump(lowering, gamma)
}

/// `H = sigma_x`, `sigma_z` dephasing at rate `gamma / 2`, plus the rank-one
/// term `X -> (gamma^2 / 16) Tr(sigma_y X) sigma_z`.
///
/// The rank-one term is what makes the closed forms exact: with the
/// dephasing term alone the oscillation frequency would be
/// `sqrt(4 - gamma^2 / 4)` rather than 2. Its Hilbert-Schmidt adjoint is
/// `A -> (gamma^2 / 16) Tr(sigma_z A) sigma_y`, which does the same for the
/// observable.
pub fn dephasing_generator<T: Real>(gamma: T) -> GeneratorSpec<T> {
    let correction = SuperOperator::rank_one(&pauli::y(), &pauli::z())
        .expect("2x2")
        .scaled(gamma * gamma / T::lit(16.0));
    GeneratorSpec::new(Hamiltonian::Static(pauli::x()), Picture::Schrodinger)
        .with_jump(pauli::z(), gamma * T::lit(0.5))
        .with_extra(correction)
}

/// Uniform grid of `grid_points` points on `[0, tau]`.
pub fn uniform_grid<T: Real>(tau: T, grid_points: usize) -> Vec<T> {
    let k = grid_points - 1;
    (0..grid_points)
        .map(|i| {
            if i == k {
                tau
            } else {
                tau * T::lit(i as f64) / T::lit(k as f64)
            }
        })
        .collect()
}

/// Samples a closed-form model on a uniform grid; derivatives come from its generator.
pub fn analytic_trajectory<T: Real>(model: &AnalyticModel<T>, tau: T, grid_points: usize) -> Result<Trajectory<T>> {
    model.validate()?;
    if grid_points < MIN_ANALYTIC_GRID {
        return Err(QslError::Config(format!(
            "grid_points must be at least {MIN_ANALYTIC_GRID}, got {grid_points}"
        )));
    }
    if !(tau > T::zero() && tau.is_finite()) {
        return Err(QslError::Config(format!("evolution time must be positive, got {tau}")));
    }
    let times = uniform_grid(tau, grid_points);
    let samples = times.iter().map(|&t| model.sample(t)).collect();
    Trajectory::from_generator(times, samples, Source::Analytic, model.generator())
}

/// `analytic_trajectory` addressed by model id.
pub fn analytic_trajectory_by_name<T: Real>(
    name: &str,
    params: &BTreeMap<String, f64>,
    tau: T,
    grid_points: usize,
) -> Result<Trajectory<T>> {
    analytic_trajectory(&AnalyticModel::from_name(name, params)?, tau, grid_points)
}
