use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::dynamics::Trajectory;
use crate::error::{QslError, Result};
use crate::norms::{arrow_norm_of_moduli, MatchedWeights, WeightVector};
use crate::scalar::{Exponent, Real};
use crate::vectorize::Basis;

use super::quadrature::{derivative_nodes, QuadratureRule};

/// Largest number of tie-block matchings evaluated before falling back to
/// the canonical one.
pub const MAX_TIE_CANDIDATES: usize = 64;
/// Largest accepted `|S_h - S_2h| / |S_h|` for the time integral.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;
/// Numerators below this multiple of the initial operator's largest entry count as zero.
pub const TRIVIAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    /// Time-averaged denominator.
    Integral,
    /// Largest denominator over the grid.
    Supremum,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Integral => "int",
            Form::Supremum => "sup",
        })
    }
}

impl FromStr for Form {
    type Err = QslError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "int" | "integral" => Ok(Form::Integral),
            "sup" | "supremum" => Ok(Form::Supremum),
            other => Err(QslError::Config(format!("unknown bound form `{other}`"))),
        }
    }
}

/// The `(p, w, basis, form)` that selects one bound.
#[derive(Debug, Clone)]
pub struct BoundSpec<T> {
    pub p: Exponent<T>,
    pub w: WeightVector<T>,
    pub basis: Basis<T>,
    pub form: Form,
}

impl<T: Real> BoundSpec<T> {
    pub fn new(p: Exponent<T>, w: WeightVector<T>, basis: Basis<T>, form: Form) -> Self {
        Self { p, w, basis, form }
    }
}

/// A bound value with the pieces it was computed from.
#[derive(Debug, Clone)]
pub struct BoundResult<T> {
    pub value: T,
    pub numerator: T,
    pub denominator: T,
    pub wbar: MatchedWeights<T>,
    pub form: Form,
    /// Both forms for the reported matching.
    pub tau_int: T,
    pub tau_sup: T,
    /// The numerator vanished and the bound is zero by convention.
    pub trivial: bool,
    /// More tie-block matchings existed than were evaluated.
    pub ties_truncated: bool,
    pub candidates_evaluated: usize,
    pub quadrature_residual: T,
}

impl<T: Real> BoundResult<T> {
    pub fn degenerate(&self) -> bool {
        self.wbar.degenerate
    }
}

/// Moduli of `vec_B` of the trajectory's difference and derivative nodes in
/// one basis. Reusable across weights and exponents.
#[derive(Debug, Clone)]
pub struct BasisView<T> {
    tag: String,
    n2: usize,
    delta_moduli: Vec<T>,
    /// `nodes x n2`, row-major.
    node_moduli: Vec<T>,
    node_max: T,
    initial_scale: T,
    tau: T,
    rule: Arc<QuadratureRule<T>>,
}

/// Node moduli raised to a power, normalized by the largest modulus.
#[derive(Debug, Clone)]
pub struct PoweredModuli<T> {
    p: Exponent<T>,
    values: Vec<T>,
}

impl<T: Real> BasisView<T> {
    pub fn new(traj: &Trajectory<T>, basis: &Basis<T>) -> Result<Self> {
        Self::with_rule(traj, basis, Arc::new(QuadratureRule::for_trajectory(traj)))
    }

    /// Uses a rule already built for `traj`.
    pub fn with_rule(traj: &Trajectory<T>, basis: &Basis<T>, rule: Arc<QuadratureRule<T>>) -> Result<Self> {
        traj.initial().check_same_dim(basis.unitary())?;
        let u = basis.unitary();
        let delta = traj.delta().in_basis(u);
        let delta_moduli: Vec<T> = delta.as_slice().iter().map(|z| z.norm()).collect();
        let nodes = derivative_nodes(traj);
        let n2 = delta_moduli.len();
        let mut node_moduli = Vec::with_capacity(nodes.len() * n2);
        for d in nodes {
            node_moduli.extend(d.in_basis(u).as_slice().iter().map(|z| z.norm()));
        }
        let node_max = node_moduli.iter().copied().fold(T::zero(), T::max);
        Ok(Self {
            tag: basis.tag().to_string(),
            n2,
            delta_moduli,
            node_moduli,
            node_max,
            initial_scale: traj.initial().max_abs().max(T::one()),
            tau: traj.tau(),
            rule,
        })
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn delta_moduli(&self) -> &[T] {
        &self.delta_moduli
    }

    pub fn powered(&self, p: Exponent<T>) -> PoweredModuli<T> {
        let values = match p {
            Exponent::Infinite => Vec::new(),
            Exponent::Finite(p) if p == T::one() => Vec::new(),
            Exponent::Finite(p) => {
                let scale = if self.node_max > T::zero() { self.node_max } else { T::one() };
                self.node_moduli.iter().map(|&a| (a / scale).powf(p)).collect()
            }
        };
        PoweredModuli { p, values }
    }

    pub fn evaluate(&self, w: &WeightVector<T>, p: Exponent<T>, form: Form) -> Result<BoundResult<T>> {
        self.evaluate_powered(&self.powered(p), w, form)
    }

    /// Bound for weights `w`, with the exponent carried by `pow`.
    pub fn evaluate_powered(&self, pow: &PoweredModuli<T>, w: &WeightVector<T>, form: Form) -> Result<BoundResult<T>> {
        let p = pow.p;
        let matched = arrow_norm_of_moduli(&self.delta_moduli, w, p)?;
        let numerator = matched.value;

        if numerator <= T::lit(TRIVIAL_TOLERANCE) * self.initial_scale {
            return Ok(BoundResult {
                value: T::zero(),
                numerator,
                denominator: T::zero(),
                wbar: matched,
                form,
                tau_int: T::zero(),
                tau_sup: T::zero(),
                trivial: true,
                ties_truncated: false,
                candidates_evaluated: 0,
                quadrature_residual: T::zero(),
            });
        }

        let (candidates, truncated) = match matched.tie_candidates(MAX_TIE_CANDIDATES) {
            Some(c) => (c, false),
            None => (vec![matched.weights.clone()], true),
        };

        let mut best: Option<(T, Evaluation<T>, Vec<T>)> = None;
        let count = candidates.len();
        for cand in candidates {
            let ev = self.denominators(pow, &cand);
            let den = match form {
                Form::Integral => ev.mean,
                Form::Supremum => ev.sup,
            };
            let value = if den > T::zero() { numerator / den } else { T::infinity() };
            if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
                best = Some((value, ev, cand));
            }
        }
        let (value, ev, weights) = best.expect("at least one candidate");
        let denominator = match form {
            Form::Integral => ev.mean,
            Form::Supremum => ev.sup,
        };
        if denominator <= T::zero() {
            return Err(QslError::ZeroDenominator {
                numerator: numerator.to_f64_lossy(),
            });
        }
        if form == Form::Integral && ev.residual > T::lit(QUADRATURE_TOLERANCE) {
            return Err(QslError::UnderResolved {
                residual: ev.residual.to_f64_lossy(),
            });
        }
        let tau_int = numerator / ev.mean;
        let tau_sup = numerator / ev.sup;
        debug_assert!(
            tau_int >= tau_sup * (T::one() - T::lit(1e-6)),
            "integral form {tau_int} below supremum form {tau_sup}"
        );

        let mut wbar = matched;
        if weights != wbar.weights {
            let mut assignment = wbar.assignment.clone();
            reorder_assignment(&mut assignment, &weights, w);
            wbar.assignment = assignment;
            wbar.weights = weights;
        }
        Ok(BoundResult {
            value,
            numerator,
            denominator,
            wbar,
            form,
            tau_int,
            tau_sup,
            trivial: false,
            ties_truncated: truncated,
            candidates_evaluated: count,
            quadrature_residual: ev.residual,
        })
    }

    fn denominators(&self, pow: &PoweredModuli<T>, weights: &[T]) -> Evaluation<T> {
        let n2 = self.n2;
        let node_count = self.node_moduli.len() / n2;
        let support: Vec<(usize, T)> = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > T::zero())
            .map(|(c, &w)| (c, w))
            .collect();
        let mut values = Vec::with_capacity(node_count);
        match pow.p {
            Exponent::Infinite => {
                for row in self.node_moduli.chunks_exact(n2) {
                    values.push(support.iter().fold(T::zero(), |m, &(c, _)| m.max(row[c])));
                }
            }
            Exponent::Finite(p) if pow.values.is_empty() => {
                debug_assert!(p == T::one());
                for row in self.node_moduli.chunks_exact(n2) {
                    values.push(support.iter().map(|&(c, w)| w * row[c]).sum());
                }
            }
            Exponent::Finite(p) => {
                let scale = if self.node_max > T::zero() { self.node_max } else { T::one() };
                let inv = p.recip();
                for row in pow.values.chunks_exact(n2) {
                    let s: T = support.iter().map(|&(c, w)| w * row[c]).sum();
                    values.push(scale * s.powf(inv));
                }
            }
        }
        let sup = values.iter().copied().fold(T::zero(), T::max);
        let integral = self.rule.integrate(&values);
        Evaluation {
            mean: integral.value / self.tau,
            sup,
            residual: integral.residual,
        }
    }
}

struct Evaluation<T> {
    mean: T,
    sup: T,
    residual: T,
}

/// Makes `assignment` consistent with a re-matched weight placement.
fn reorder_assignment<T: Real>(assignment: &mut [usize], weights: &[T], w: &WeightVector<T>) {
    let mut used = vec![false; assignment.len()];
    let mut order: Vec<usize> = Vec::with_capacity(assignment.len());
    for &target in w.entries() {
        // coordinates are visited in the original rank order so untouched ranks keep their place
        let c = assignment
            .iter()
            .copied()
            .find(|&c| !used[c] && weights[c] == target)
            .expect("weights are a permutation of w");
        used[c] = true;
        order.push(c);
    }
    assignment.copy_from_slice(&order);
}

/// Evaluates the weighted-norm speed limit of `traj` for `spec`.
pub fn qsl_bound<T: Real>(traj: &Trajectory<T>, spec: &BoundSpec<T>) -> Result<BoundResult<T>> {
    let n2 = traj.dim() * traj.dim();
    if spec.w.len() != n2 {
        return Err(QslError::LengthMismatch {
            left: spec.w.len(),
            right: n2,
        });
    }
    BasisView::new(traj, &spec.basis)?.evaluate(&spec.w, spec.p, spec.form)
}
