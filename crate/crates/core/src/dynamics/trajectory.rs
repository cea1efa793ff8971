use crate::error::{QslError, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;
use crate::spectral::check_density;

use super::generator::{GeneratorSpec, Picture};

/// Density-matrix trace and Hermiticity tolerance along a trajectory.
pub const STATE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Analytic,
    Integrated,
}

/// A grid point where the generator switches; the stored derivative is the
/// limit from the left, while `derivatives[index]` is the value after the switch.
#[derive(Debug, Clone)]
pub struct Break<T> {
    pub index: usize,
    pub left_derivative: ComplexMatrix<T>,
}

/// Operator samples and their time derivatives on a grid over `[t_0, t_K]`.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    times: Vec<T>,
    samples: Vec<ComplexMatrix<T>>,
    derivatives: Vec<ComplexMatrix<T>>,
    breaks: Vec<Break<T>>,
    source: Source,
    generator: GeneratorSpec<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(
        times: Vec<T>,
        samples: Vec<ComplexMatrix<T>>,
        derivatives: Vec<ComplexMatrix<T>>,
        source: Source,
        generator: GeneratorSpec<T>,
    ) -> Result<Self> {
        if times.len() < 2 {
            return Err(QslError::InvalidTrajectory("need at least two samples".into()));
        }
        if samples.len() != times.len() || derivatives.len() != times.len() {
            return Err(QslError::InvalidTrajectory(format!(
                "{} times, {} samples, {} derivatives",
                times.len(),
                samples.len(),
                derivatives.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(QslError::InvalidTrajectory("times must be finite and strictly increasing".into()));
        }
        let n = samples[0].dim();
        for m in samples.iter().chain(&derivatives) {
            if m.dim() != n {
                return Err(QslError::DimensionMismatch {
                    expected: n,
                    found: m.dim(),
                });
            }
            if !m.is_finite() {
                return Err(QslError::NonFinite("trajectory sample".into()));
            }
        }
        Ok(Self {
            times,
            samples,
            derivatives,
            breaks: Vec::new(),
            source,
            generator,
        })
    }

    /// Builds a trajectory whose derivatives are the generator applied to
    /// each sample, splitting at the generator's switch times.
    pub fn from_generator(
        times: Vec<T>,
        samples: Vec<ComplexMatrix<T>>,
        source: Source,
        generator: GeneratorSpec<T>,
    ) -> Result<Self> {
        generator.validate()?;
        let mut derivatives = Vec::with_capacity(samples.len());
        for (t, x) in times.iter().zip(&samples) {
            generator.hamiltonian_at(*t)?;
            derivatives.push(generator.apply(x, *t));
        }
        let mut traj = Self::new(times, samples, derivatives, source, generator)?;
        let tau = *traj.times.last().expect("non-empty");
        for b in traj.generator.hamiltonian.breakpoints(tau) {
            let index = traj.times.iter().position(|&t| t == b).ok_or_else(|| {
                QslError::InvalidTrajectory(format!("switch time {b} is not a grid point"))
            })?;
            let left_derivative = traj.generator.apply_left(&traj.samples[index], b);
            traj.breaks.push(Break { index, left_derivative });
        }
        Ok(traj)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn samples(&self) -> &[ComplexMatrix<T>] {
        &self.samples
    }

    pub fn derivatives(&self) -> &[ComplexMatrix<T>] {
        &self.derivatives
    }

    pub fn breaks(&self) -> &[Break<T>] {
        &self.breaks
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn generator(&self) -> &GeneratorSpec<T> {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Total duration `t_K - t_0`.
    pub fn tau(&self) -> T {
        self.times[self.times.len() - 1] - self.times[0]
    }

    pub fn initial(&self) -> &ComplexMatrix<T> {
        &self.samples[0]
    }

    pub fn last(&self) -> &ComplexMatrix<T> {
        &self.samples[self.samples.len() - 1]
    }

    /// `x(tau) - x(0)`.
    pub fn delta(&self) -> ComplexMatrix<T> {
        self.last() - self.initial()
    }

    /// Index ranges `[a, b]` (inclusive) of the smooth pieces, with the
    /// derivative to use at each segment's right end.
    pub fn segments(&self) -> Vec<(usize, usize)> {
        let mut cuts: Vec<usize> = self.breaks.iter().map(|b| b.index).collect();
        cuts.sort_unstable();
        let mut out = Vec::with_capacity(cuts.len() + 1);
        let mut start = 0;
        for c in cuts {
            out.push((start, c));
            start = c;
        }
        out.push((start, self.len() - 1));
        out
    }

    /// Derivative at `index` as seen from the segment ending there.
    pub fn derivative_from_left(&self, index: usize) -> &ComplexMatrix<T> {
        self.breaks
            .iter()
            .find(|b| b.index == index)
            .map(|b| &b.left_derivative)
            .unwrap_or(&self.derivatives[index])
    }

    /// Checks unit trace, Hermiticity and positivity of every sample.
    pub fn check_states(&self) -> Result<()> {
        if self.generator.picture != Picture::Schrodinger {
            return Err(QslError::InvalidTrajectory(
                "expected a state (Schrodinger-picture) trajectory".into(),
            ));
        }
        for s in &self.samples {
            s.check_hermitian(T::tol(STATE_TOLERANCE))?;
            check_density(s)?;
        }
        Ok(())
    }

    /// Largest `||derivative_k - G(sample_k)||_F`.
    pub fn consistency_residual(&self) -> T {
        self.times
            .iter()
            .zip(self.samples.iter().zip(&self.derivatives))
            .map(|(&t, (x, d))| (d - &self.generator.apply(x, t)).frobenius_norm())
            .fold(T::zero(), T::max)
    }
}
