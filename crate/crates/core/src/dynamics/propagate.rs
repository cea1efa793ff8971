use crate::error::{QslError, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

use super::generator::GeneratorSpec;
use super::trajectory::{Source, Trajectory};

/// Grid refinement stops when the final sample moves less than this (Frobenius).
pub const CONVERGENCE_TOLERANCE: f64 = 1e-9;
/// Largest total step count tried before giving up.
pub const MAX_STEPS: usize = 1 << 20;
pub const MIN_BASE_STEPS: usize = 16;

/// Integrates `gen` from `initial` over `[0, tau]` with classic RK4.
///
/// Switch times of a piecewise Hamiltonian become grid points. The step count
/// starts at `base_steps` and doubles until the final sample converges.
pub fn propagate<T: Real>(
    gen: &GeneratorSpec<T>,
    initial: &ComplexMatrix<T>,
    tau: T,
    base_steps: usize,
) -> Result<Trajectory<T>> {
    gen.validate()?;
    if initial.dim() != gen.dim() {
        return Err(QslError::DimensionMismatch {
            expected: gen.dim(),
            found: initial.dim(),
        });
    }
    if !(tau > T::zero() && tau.is_finite()) {
        return Err(QslError::Config(format!("evolution time must be positive, got {tau}")));
    }
    if base_steps < MIN_BASE_STEPS {
        return Err(QslError::Config(format!(
            "base_steps must be at least {MIN_BASE_STEPS}, got {base_steps}"
        )));
    }

    // A coarse grid may be RK4-unstable and overflow; that only means the
    // refinement has to continue.
    let mut steps = base_steps;
    let mut prev = integrate(gen, initial, tau, steps);
    loop {
        steps *= 2;
        let cur = integrate(gen, initial, tau, steps);
        let residual = match (&prev, &cur) {
            (Ok(p), Ok(c)) => (c.1.last().expect("non-empty") - p.1.last().expect("non-empty")).frobenius_norm(),
            _ => T::infinity(),
        };
        if residual < T::tol(CONVERGENCE_TOLERANCE) {
            let (times, samples) = cur?;
            return Trajectory::from_generator(times, samples, Source::Integrated, gen.clone());
        }
        if steps * 2 > MAX_STEPS {
            cur?;
            return Err(QslError::ConvergenceCap {
                steps,
                residual: residual.to_f64_lossy(),
            });
        }
        prev = cur;
    }
}

/// Uniform sub-grids between consecutive switch times, about `steps` in total.
pub(crate) fn segmented_grid<T: Real>(breakpoints: &[T], tau: T, steps: usize) -> Vec<T> {
    let mut edges = vec![T::zero()];
    edges.extend_from_slice(breakpoints);
    edges.push(tau);
    let mut times = vec![T::zero()];
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let share = ((b - a) / tau * T::lit(steps as f64)).to_f64_lossy().round() as usize;
        let m = (share.max(2) + 1) / 2 * 2;
        for k in 1..m {
            times.push(a + (b - a) * T::lit(k as f64) / T::lit(m as f64));
        }
        times.push(b);
    }
    times
}

type Samples<T> = (Vec<T>, Vec<ComplexMatrix<T>>);

fn integrate<T: Real>(gen: &GeneratorSpec<T>, initial: &ComplexMatrix<T>, tau: T, steps: usize) -> Result<Samples<T>> {
    let times = segmented_grid(&gen.hamiltonian.breakpoints(tau), tau, steps);
    let mut samples = Vec::with_capacity(times.len());
    let mut x = initial.clone();
    samples.push(x.clone());
    let half = T::lit(0.5);
    let sixth = T::lit(1.0 / 6.0);
    for w in times.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        let mid = t + h * half;
        let (k1, k2, k3, k4);
        if gen.stepwise_constant() {
            let ham = gen.hamiltonian.at(mid);
            k1 = gen.apply_with(&x, &ham);
            k2 = gen.apply_with(&axpy(&x, h * half, &k1), &ham);
            k3 = gen.apply_with(&axpy(&x, h * half, &k2), &ham);
            k4 = gen.apply_with(&axpy(&x, h, &k3), &ham);
        } else {
            k1 = gen.apply(&x, t);
            k2 = gen.apply(&axpy(&x, h * half, &k1), mid);
            k3 = gen.apply(&axpy(&x, h * half, &k2), mid);
            k4 = gen.apply(&axpy(&x, h, &k3), t + h);
        }
        let mut next = x.clone();
        next.add_scaled((h * sixth).into(), &k1);
        next.add_scaled((h * sixth * T::lit(2.0)).into(), &k2);
        next.add_scaled((h * sixth * T::lit(2.0)).into(), &k3);
        next.add_scaled((h * sixth).into(), &k4);
        if !next.is_finite() {
            return Err(QslError::NonFinite(format!("RK4 state at t = {}", t + h)));
        }
        x = next;
        samples.push(x.clone());
    }
    Ok((times, samples))
}

fn axpy<T: Real>(x: &ComplexMatrix<T>, a: T, y: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut out = x.clone();
    out.add_scaled(a.into(), y);
    out
}
