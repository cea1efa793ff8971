use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{QslError, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{cplx, Real, C};

/// Hermiticity tolerance for Hamiltonians.
pub const HAMILTONIAN_TOLERANCE: f64 = 1e-10;

pub type HamiltonianFn<T> = Arc<dyn Fn(T) -> ComplexMatrix<T> + Send + Sync>;

/// A Hamiltonian as a function of time.
#[derive(Clone)]
pub enum Hamiltonian<T> {
    Static(ComplexMatrix<T>),
    /// `pieces[i]` holds on `[switch_times[i-1], switch_times[i])`; right-continuous.
    Piecewise {
        switch_times: Vec<T>,
        pieces: Vec<ComplexMatrix<T>>,
    },
    /// Smooth time dependence. Discontinuities here are not tracked.
    TimeDependent { dim: usize, f: HamiltonianFn<T> },
}

impl<T: Real> Hamiltonian<T> {
    pub fn zero(dim: usize) -> Self {
        Hamiltonian::Static(ComplexMatrix::zeros(dim))
    }

    pub fn piecewise(switch_times: Vec<T>, pieces: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if pieces.len() != switch_times.len() + 1 {
            return Err(QslError::InvalidGenerator(format!(
                "{} pieces need {} switch times, got {}",
                pieces.len(),
                pieces.len().saturating_sub(1),
                switch_times.len()
            )));
        }
        if switch_times.windows(2).any(|w| w[0] >= w[1]) || switch_times.iter().any(|t| !t.is_finite()) {
            return Err(QslError::InvalidGenerator("switch times must be finite and increasing".into()));
        }
        for p in &pieces[1..] {
            pieces[0].check_same_dim(p)?;
        }
        Ok(Hamiltonian::Piecewise { switch_times, pieces })
    }

    pub fn time_dependent(dim: usize, f: impl Fn(T) -> ComplexMatrix<T> + Send + Sync + 'static) -> Self {
        Hamiltonian::TimeDependent { dim, f: Arc::new(f) }
    }

    pub fn dim(&self) -> usize {
        match self {
            Hamiltonian::Static(h) => h.dim(),
            Hamiltonian::Piecewise { pieces, .. } => pieces[0].dim(),
            Hamiltonian::TimeDependent { dim, .. } => *dim,
        }
    }

    /// `H(t)`; at a switch time this is the value after the switch.
    pub fn at(&self, t: T) -> ComplexMatrix<T> {
        match self {
            Hamiltonian::Static(h) => h.clone(),
            Hamiltonian::Piecewise { switch_times, pieces } => {
                let idx = switch_times.iter().take_while(|&&s| s <= t).count();
                pieces[idx].clone()
            }
            Hamiltonian::TimeDependent { f, .. } => f(t),
        }
    }

    /// `lim_{s -> t^-} H(s)`.
    pub fn left_limit(&self, t: T) -> ComplexMatrix<T> {
        match self {
            Hamiltonian::Piecewise { switch_times, pieces } => {
                let idx = switch_times.iter().take_while(|&&s| s < t).count();
                pieces[idx].clone()
            }
            _ => self.at(t),
        }
    }

    /// Switch times in the open interval `(0, tau)`.
    pub fn breakpoints(&self, tau: T) -> Vec<T> {
        match self {
            Hamiltonian::Piecewise { switch_times, .. } => switch_times
                .iter()
                .copied()
                .filter(|&s| s > T::zero() && s < tau)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// `H` is constant within each step; a step never straddles a switch.
    fn is_stepwise_constant(&self) -> bool {
        !matches!(self, Hamiltonian::TimeDependent { .. })
    }

    fn validate(&self) -> Result<()> {
        let tol = T::tol(HAMILTONIAN_TOLERANCE);
        match self {
            Hamiltonian::Static(h) => h.check_hermitian(tol),
            Hamiltonian::Piecewise { pieces, .. } => pieces.iter().try_for_each(|h| h.check_hermitian(tol)),
            Hamiltonian::TimeDependent { .. } => Ok(()),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Hamiltonian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hamiltonian::Static(h) => f.debug_tuple("Static").field(h).finish(),
            Hamiltonian::Piecewise { switch_times, pieces } => f
                .debug_struct("Piecewise")
                .field("switch_times", switch_times)
                .field("pieces", pieces)
                .finish(),
            Hamiltonian::TimeDependent { dim, .. } => {
                f.debug_struct("TimeDependent").field("dim", dim).finish_non_exhaustive()
            }
        }
    }
}

/// Linear map on `n x n` matrices stored as an `n^2 x n^2` matrix acting on
/// the row-by-row entry list.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator<T> {
    matrix: ComplexMatrix<T>,
    n: usize,
}

impl<T: Real> SuperOperator<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        let n2 = matrix.dim();
        let n = (n2 as f64).sqrt().round() as usize;
        if n * n != n2 {
            return Err(QslError::InvalidGenerator(format!(
                "superoperator dimension {n2} is not a perfect square"
            )));
        }
        Ok(Self { matrix, n })
    }

    /// `X -> Tr(a^dagger X) b`.
    pub fn rank_one(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<Self> {
        a.check_same_dim(b)?;
        let (av, bv) = (a.as_slice(), b.as_slice());
        Self::new(ComplexMatrix::from_fn(av.len(), |r, c| bv[r] * av[c].conj()))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn apply(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        apply_dense(&self.matrix, x, false)
    }

    /// The Hilbert-Schmidt adjoint map.
    pub fn apply_adjoint(&self, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        apply_dense(&self.matrix, x, true)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
            n: self.n,
        }
    }
}

fn apply_dense<T: Real>(s: &ComplexMatrix<T>, x: &ComplexMatrix<T>, adjoint: bool) -> ComplexMatrix<T> {
    let v = x.as_slice();
    let n2 = v.len();
    let out = (0..n2)
        .map(|r| {
            (0..n2).fold(C::zero(), |acc, c| {
                let m = if adjoint { s[(c, r)].conj() } else { s[(r, c)] };
                acc + m * v[c]
            })
        })
        .collect();
    ComplexMatrix::new(x.dim(), out).expect("square input")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    /// States evolve by the master equation.
    Schrodinger,
    /// Observables evolve by the adjoint generator.
    Heisenberg,
}

/// A time-local generator: Hamiltonian part, weighted jump operators, and an
/// optional extra linear term.
#[derive(Debug, Clone)]
pub struct GeneratorSpec<T> {
    pub hamiltonian: Hamiltonian<T>,
    pub jumps: Vec<(ComplexMatrix<T>, T)>,
    pub extra: Option<SuperOperator<T>>,
    pub picture: Picture,
    pub hbar: T,
}

impl<T: Real> GeneratorSpec<T> {
    pub fn new(hamiltonian: Hamiltonian<T>, picture: Picture) -> Self {
        Self {
            hamiltonian,
            jumps: Vec::new(),
            extra: None,
            picture,
            hbar: T::one(),
        }
    }

    pub fn closed(h: ComplexMatrix<T>) -> Self {
        Self::new(Hamiltonian::Static(h), Picture::Schrodinger)
    }

    pub fn with_jump(mut self, op: ComplexMatrix<T>, rate: T) -> Self {
        self.jumps.push((op, rate));
        self
    }

    pub fn with_extra(mut self, extra: SuperOperator<T>) -> Self {
        self.extra = Some(extra);
        self
    }

    pub fn with_hbar(mut self, hbar: T) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn with_picture(mut self, picture: Picture) -> Self {
        self.picture = picture;
        self
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn is_closed(&self) -> bool {
        self.jumps.iter().all(|(_, g)| g.is_zero()) && self.extra.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if !(self.hbar > T::zero() && self.hbar.is_finite()) {
            return Err(QslError::InvalidGenerator("hbar must be positive and finite".into()));
        }
        self.hamiltonian.validate()?;
        for (op, rate) in &self.jumps {
            if op.dim() != n {
                return Err(QslError::DimensionMismatch {
                    expected: n,
                    found: op.dim(),
                });
            }
            if !(rate.is_finite() && *rate >= T::zero()) {
                return Err(QslError::InvalidGenerator(format!(
                    "jump rate {} must be finite and nonnegative",
                    rate
                )));
            }
        }
        if let Some(s) = &self.extra {
            if s.dim() != n {
                return Err(QslError::DimensionMismatch {
                    expected: n,
                    found: s.dim(),
                });
            }
        }
        Ok(())
    }

    fn check_operand(&self, x: &ComplexMatrix<T>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(QslError::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Hamiltonian at `t`, checked for Hermiticity.
    pub fn hamiltonian_at(&self, t: T) -> Result<ComplexMatrix<T>> {
        let h = self.hamiltonian.at(t);
        h.check_hermitian(T::tol(HAMILTONIAN_TOLERANCE))?;
        Ok(h)
    }

    /// Applies the generator of this spec's picture with a given Hamiltonian.
    pub fn apply_with(&self, x: &ComplexMatrix<T>, h: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        match self.picture {
            Picture::Schrodinger => self.schrodinger_with(x, h),
            Picture::Heisenberg => self.heisenberg_with(x, h),
        }
    }

    /// `d/dt` of `x` at time `t` (right-continuous Hamiltonian).
    pub fn apply(&self, x: &ComplexMatrix<T>, t: T) -> ComplexMatrix<T> {
        self.apply_with(x, &self.hamiltonian.at(t))
    }

    /// `d/dt` of `x` just before `t`.
    pub fn apply_left(&self, x: &ComplexMatrix<T>, t: T) -> ComplexMatrix<T> {
        self.apply_with(x, &self.hamiltonian.left_limit(t))
    }

    pub(crate) fn stepwise_constant(&self) -> bool {
        self.hamiltonian.is_stepwise_constant()
    }

    fn schrodinger_with(&self, rho: &ComplexMatrix<T>, h: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let minus_i_over_hbar = cplx(T::zero(), -self.hbar.recip());
        let mut out = h.commutator(rho).scale(minus_i_over_hbar);
        for (l, rate) in &self.jumps {
            if rate.is_zero() {
                continue;
            }
            let ld = l.adjoint();
            let ldl = &ld * l;
            let sandwich = &(l * rho) * &ld;
            let anti = ldl.anticommutator(rho).scale_real(T::lit(0.5));
            out.add_scaled(C::from(*rate), &(&sandwich - &anti));
        }
        if let Some(s) = &self.extra {
            out = &out + &s.apply(rho);
        }
        out
    }

    fn heisenberg_with(&self, a: &ComplexMatrix<T>, h: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let i_over_hbar = cplx(T::zero(), self.hbar.recip());
        let mut out = h.commutator(a).scale(i_over_hbar);
        for (l, rate) in &self.jumps {
            if rate.is_zero() {
                continue;
            }
            let ld = l.adjoint();
            let ldl = &ld * l;
            let sandwich = &(&ld * a) * l;
            let anti = ldl.anticommutator(a).scale_real(T::lit(0.5));
            out.add_scaled(C::from(*rate), &(&sandwich - &anti));
        }
        if let Some(s) = &self.extra {
            out = &out + &s.apply_adjoint(a);
        }
        out
    }
}

/// Master-equation right-hand side `L(rho)` at time `t`.
pub fn lindblad_rhs<T: Real>(rho: &ComplexMatrix<T>, gen: &GeneratorSpec<T>, t: T) -> Result<ComplexMatrix<T>> {
    gen.check_operand(rho)?;
    let h = gen.hamiltonian_at(t)?;
    Ok(gen.schrodinger_with(rho, &h))
}

/// Adjoint right-hand side `L^dagger(A)` at time `t`.
pub fn adjoint_rhs<T: Real>(a: &ComplexMatrix<T>, gen: &GeneratorSpec<T>, t: T) -> Result<ComplexMatrix<T>> {
    gen.check_operand(a)?;
    let h = gen.hamiltonian_at(t)?;
    Ok(gen.heisenberg_with(a, &h))
}
