//! Search over exponent, weights and basis for the largest bound.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bounds::{quadrature::QuadratureRule, BasisView, Form, PoweredModuli};
use crate::dynamics::Trajectory;
use crate::error::{QslError, Result};
use crate::haar::{haar_unitary_from_rng, seeded_rng};
use crate::matrix::ComplexMatrix;
use crate::norms::WeightVector;
use crate::scalar::{cplx, Exponent, Real};
use crate::spectral::unitary_exp;
use crate::vectorize::Basis;

/// Consecutive rejections after which the hill-climb step is halved.
pub const REJECTIONS_BEFORE_HALVING: usize = 10;
/// The hill climb stops once its step falls below this.
pub const MIN_STEP: f64 = 1e-6;
/// Golden-section iterations when refining `p`.
pub const GOLDEN_ITERATIONS: usize = 20;
/// Relative margin by which a refined `p` must beat the grid.
pub const REFINE_MARGIN: f64 = 1e-12;
/// Relative margin a hill-climb step must gain to be accepted, so that
/// rounding noise on a flat landscape is not taken for progress.
pub const ACCEPT_MARGIN: f64 = 1e-12;
/// Relative distance from the optimum within which a `(p, j)` pair counts as optimal too.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

const HILLCLIMB_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone)]
pub struct OptimizeConfig<T> {
    pub p_grid: Vec<Exponent<T>>,
    pub basis_samples: usize,
    pub hillclimb_iters: usize,
    pub hillclimb_step: T,
    /// Number of best-ranked sampled bases each refined by its own hill climb.
    pub hillclimb_starts: usize,
    pub seed: u64,
    pub target_form: Form,
}

impl<T: Real> Default for OptimizeConfig<T> {
    fn default() -> Self {
        let mut p_grid: Vec<Exponent<T>> = [1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0].iter().map(|&p| Exponent::finite(p)).collect();
        p_grid.push(Exponent::Infinite);
        Self {
            p_grid,
            basis_samples: 100,
            hillclimb_iters: 1500,
            hillclimb_step: T::lit(0.1),
            hillclimb_starts: 4,
            seed: 0,
            target_form: Form::Integral,
        }
    }
}

impl<T: Real> OptimizeConfig<T> {
    pub fn validate(&self) -> Result<()> {
        validate_p_grid(&self.p_grid)?;
        if self.basis_samples == 0 {
            return Err(QslError::Config("basis_samples must be at least 1".into()));
        }
        if !(self.hillclimb_step > T::zero()) || !self.hillclimb_step.is_finite() {
            return Err(QslError::Config("hillclimb_step must be positive".into()));
        }
        if self.hillclimb_starts == 0 {
            return Err(QslError::Config("hillclimb_starts must be at least 1".into()));
        }
        Ok(())
    }
}

fn validate_p_grid<T: Real>(grid: &[Exponent<T>]) -> Result<()> {
    let mut prev: Option<Exponent<T>> = None;
    for &p in grid {
        if let Exponent::Finite(v) = p {
            if v < T::one() || !v.is_finite() {
                return Err(QslError::Config(format!("p grid entry {v} outside [1, inf]")));
            }
        }
        if let Some(q) = prev {
            let ascending = match (q, p) {
                (Exponent::Finite(a), Exponent::Finite(b)) => a < b,
                (Exponent::Finite(_), Exponent::Infinite) => true,
                (Exponent::Infinite, _) => false,
            };
            if !ascending {
                return Err(QslError::Config("p grid must be strictly ascending".into()));
            }
        }
        prev = Some(p);
    }
    let has = |x: f64| grid.iter().any(|p| matches!(p, Exponent::Finite(v) if *v == T::lit(x)));
    if !has(1.0) || !has(2.0) {
        return Err(QslError::Config("p grid must contain 1 and 2".into()));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct OptimumReport<T> {
    pub best_value: T,
    pub best_p: Exponent<T>,
    /// `w = 1_j`: the first `j` weights one, the rest zero.
    pub best_w_index: usize,
    pub best_basis: ComplexMatrix<T>,
    pub best_basis_tag: String,
    /// Accepted improvements as `(iteration, value)`; iteration 0 is the sampling phase.
    pub history: Vec<(usize, T)>,
    /// Grid `(p, j)` pairs at the best basis whose value ties the optimum.
    pub degenerate_optima_count: usize,
    pub evaluations: usize,
}

/// Largest value over `w = 1_j`, `j = 1..n^2`; the smallest `j` wins ties.
pub fn optimize_w<T: Real>(traj: &Trajectory<T>, p: Exponent<T>, basis: &Basis<T>, form: Form) -> Result<(usize, T)> {
    let view = BasisView::new(traj, basis)?;
    scan_w(&view, &view.powered(p), form)
}

fn scan_w<T: Real>(view: &BasisView<T>, pow: &PoweredModuli<T>, form: Form) -> Result<(usize, T)> {
    let n2 = view.delta_moduli().len();
    let values = (1..=n2)
        .into_par_iter()
        .map(|j| Ok(view.evaluate_powered(pow, &WeightVector::indicator(n2, j)?, form)?.value))
        .collect::<Result<Vec<T>>>()?;
    let (i, v) = first_max(values).expect("n^2 >= 1");
    Ok((i + 1, v))
}

/// Best `p` on the grid, refined by golden-section search between the
/// neighbours of the grid maximum. An infinite maximum is not refined.
pub fn optimize_p<T: Real>(
    traj: &Trajectory<T>,
    w: &WeightVector<T>,
    basis: &Basis<T>,
    form: Form,
    p_grid: &[Exponent<T>],
) -> Result<(Exponent<T>, T)> {
    validate_p_grid(p_grid)?;
    let view = BasisView::new(traj, basis)?;
    refine_p(&view, p_grid, |view, p| Ok(view.evaluate(w, p, form)?.value))
}

fn refine_p<T: Real>(
    view: &BasisView<T>,
    grid: &[Exponent<T>],
    eval: impl Fn(&BasisView<T>, Exponent<T>) -> Result<T>,
) -> Result<(Exponent<T>, T)> {
    let values = grid.iter().map(|&p| eval(view, p)).collect::<Result<Vec<_>>>()?;
    let mut i_best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[i_best] {
            i_best = i;
        }
    }
    let (grid_p, grid_v) = (grid[i_best], values[i_best]);
    let Exponent::Finite(center) = grid_p else {
        return Ok((grid_p, grid_v));
    };
    let lo = if i_best > 0 { grid[i_best - 1].value() } else { center };
    let hi = match grid.get(i_best + 1) {
        Some(Exponent::Finite(v)) => *v,
        _ => center,
    };
    if !(hi > lo) {
        return Ok((grid_p, grid_v));
    }

    let f = |p: T| eval(view, Exponent::Finite(p));
    let ratio = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for _ in 0..GOLDEN_ITERATIONS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
            if fd > best.1 {
                best = (d, fd);
            }
        }
    }
    if best.1 > grid_v * (T::one() + T::lit(REFINE_MARGIN)) {
        Ok((Exponent::Finite(best.0), best.1))
    } else {
        Ok((grid_p, grid_v))
    }
}

/// Random anti-Hermitian matrix with unit Frobenius norm: complex Gaussians
/// above the diagonal, imaginary Gaussians on it.
pub fn random_anti_hermitian<T: Real>(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix<T> {
    let mut k = ComplexMatrix::zeros(n);
    for r in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        k[(r, r)] = cplx(T::zero(), T::lit(d));
        for c in r + 1..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = cplx(T::lit(re), T::lit(im));
            k[(r, c)] = z;
            k[(c, r)] = -z.conj();
        }
    }
    let norm = k.frobenius_norm();
    if norm > T::zero() {
        k.scale_real(norm.recip())
    } else {
        k
    }
}

/// The sampling-phase bases: canonical, the `Delta(tau)` eigenbasis when
/// `Delta` is Hermitian, and `samples` Haar unitaries on per-sample streams.
fn candidate_bases<T: Real>(traj: &Trajectory<T>, samples: usize, seed: u64) -> Result<Vec<Basis<T>>> {
    let n = traj.dim();
    let mut out = vec![Basis::canonical(n)];
    let delta = traj.delta();
    if delta.check_hermitian(T::tol(1e-10)).is_ok() {
        out.push(Basis::eigenbasis(&delta, "delta_diag")?);
    }
    let haar: Vec<Basis<T>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let u = haar_unitary_from_rng(n, &mut seeded_rng(seed, i as u64));
            Basis::new(u, format!("haar:{seed}/{i}"))
        })
        .collect::<Result<_>>()?;
    out.extend(haar);
    Ok(out)
}

/// Index of the first maximum.
fn first_max<T: Real>(values: impl IntoIterator<Item = T>) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best
}

/// Stochastic hill climb `U <- U exp(eps K)` from `start`. `score` returns
/// the value of a basis; only strict improvements are accepted.
fn hill_climb<T: Real, S>(
    start: Basis<T>,
    start_value: T,
    iters: usize,
    step: T,
    rng: &mut ChaCha8Rng,
    mut score: impl FnMut(&Basis<T>) -> Result<(T, S)>,
    mut on_accept: impl FnMut(S),
) -> Result<(Basis<T>, T, Vec<(usize, T)>)> {
    let n = start.dim();
    let mut current = start;
    let mut value = start_value;
    let mut history = vec![(0, value)];
    let mut eps = step;
    let mut rejections = 0;
    for it in 1..=iters {
        if eps < T::lit(MIN_STEP) {
            break;
        }
        let k = random_anti_hermitian::<T>(n, rng);
        let u = (current.unitary() * &unitary_exp(&k, eps)?).reorthonormalized();
        let cand = Basis::new(u, format!("{}+hc", current.tag().trim_end_matches("+hc")))?;
        let (v, extra) = score(&cand)?;
        if v > value + T::lit(ACCEPT_MARGIN) * value.abs() {
            current = cand;
            value = v;
            history.push((it, v));
            on_accept(extra);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= REJECTIONS_BEFORE_HALVING {
                eps = eps * T::lit(0.5);
                rejections = 0;
            }
        }
    }
    Ok((current, value, history))
}

/// Best basis for fixed `(p, w)`: sampling phase, then hill climbing.
pub fn optimize_basis<T: Real>(
    traj: &Trajectory<T>,
    p: Exponent<T>,
    w: &WeightVector<T>,
    form: Form,
    cfg: &OptimizeConfig<T>,
) -> Result<(Basis<T>, T, Vec<(usize, T)>)> {
    cfg.validate()?;
    let rule = Arc::new(QuadratureRule::for_trajectory(traj));
    let eval = |b: &Basis<T>| -> Result<T> {
        let view = BasisView::with_rule(traj, b, rule.clone())?;
        Ok(view.evaluate(w, p, form)?.value)
    };
    let bases = candidate_bases(traj, cfg.basis_samples, cfg.seed)?;
    let values = bases.par_iter().map(eval).collect::<Result<Vec<_>>>()?;
    let (i, v) = first_max(values).expect("at least the canonical basis");
    let mut rng = seeded_rng(cfg.seed, HILLCLIMB_STREAM);
    hill_climb(
        bases[i].clone(),
        v,
        cfg.hillclimb_iters,
        cfg.hillclimb_step,
        &mut rng,
        |b| Ok((eval(b)?, ())),
        |_| {},
    )
}

/// Best `(j, p index, value)` for one basis over the whole grid.
fn scan_grid<T: Real>(view: &BasisView<T>, grid: &[Exponent<T>], form: Form) -> Result<(usize, usize, T)> {
    let mut best = (1, 0, T::neg_infinity());
    for (pi, &p) in grid.iter().enumerate() {
        let (j, v) = scan_w(view, &view.powered(p), form)?;
        if v > best.2 {
            best = (j, pi, v);
        }
    }
    Ok(best)
}

/// Joint search over the p grid, the weight indicators and the basis.
///
/// Every sampled basis gets the full `(p, j)` scan. The hill climb then holds
/// `p` at the incumbent and rescans `j` for each perturbed basis. Finally `p`
/// is refined by golden-section search at the best `(basis, j)`.
pub fn optimize_full<T: Real>(traj: &Trajectory<T>, cfg: &OptimizeConfig<T>) -> Result<OptimumReport<T>> {
    cfg.validate()?;
    let form = cfg.target_form;
    let n2 = traj.dim() * traj.dim();
    let rule = Arc::new(QuadratureRule::for_trajectory(traj));
    let bases = candidate_bases(traj, cfg.basis_samples, cfg.seed)?;
    let scans = bases
        .par_iter()
        .map(|b| scan_grid(&BasisView::with_rule(traj, b, rule.clone())?, &cfg.p_grid, form))
        .collect::<Result<Vec<_>>>()?;
    let mut evaluations = bases.len() * cfg.p_grid.len() * n2;
    // stable sort keeps the candidate order on ties
    let mut order: Vec<usize> = (0..bases.len()).collect();
    order.sort_by(|&a, &b| scans[b].2.partial_cmp(&scans[a].2).unwrap_or(std::cmp::Ordering::Equal));
    order.truncate(cfg.hillclimb_starts);

    let climbs = order
        .par_iter()
        .enumerate()
        .map(|(s, &bi)| {
            let (j0, pi, v0) = scans[bi];
            let p = cfg.p_grid[pi];
            let mut best_j = j0;
            let mut count = 0;
            let mut rng = seeded_rng(cfg.seed, HILLCLIMB_STREAM - s as u64);
            let (basis, value, history) = hill_climb(
                bases[bi].clone(),
                v0,
                cfg.hillclimb_iters,
                cfg.hillclimb_step,
                &mut rng,
                |b| {
                    count += n2;
                    let view = BasisView::with_rule(traj, b, rule.clone())?;
                    let (j, v) = scan_w(&view, &view.powered(p), form)?;
                    Ok((v, j))
                },
                |j| best_j = j,
            )?;
            Ok((basis, value, history, best_j, p, count))
        })
        .collect::<Result<Vec<_>>>()?;
    evaluations += climbs.iter().map(|c| c.5).sum::<usize>();
    let (winner, _) = first_max(climbs.iter().map(|c| c.1)).expect("at least one start");
    let (basis, value, history, best_j, p, _) = climbs.into_iter().nth(winner).expect("winner exists");

    let view = BasisView::with_rule(traj, &basis, rule.clone())?;
    let w = WeightVector::indicator(n2, best_j)?;
    let (best_p, best_value) = if value > T::zero() {
        let (rp, rv) = refine_p(&view, &cfg.p_grid, |view, q| Ok(view.evaluate(&w, q, form)?.value))?;
        evaluations += cfg.p_grid.len() + GOLDEN_ITERATIONS + 2;
        // the refinement restarts from the grid, so keep the incumbent p unless it is beaten
        if rv > value * (T::one() + T::lit(REFINE_MARGIN)) {
            (rp, rv)
        } else {
            (p, value)
        }
    } else {
        (p, value)
    };

    let mut degenerate = 0;
    for &q in &cfg.p_grid {
        let pow = view.powered(q);
        for j in 1..=n2 {
            let v = view.evaluate_powered(&pow, &WeightVector::indicator(n2, j)?, form)?.value;
            if (v - best_value).abs() <= T::lit(DEGENERACY_TOLERANCE) * best_value.abs().max(T::min_positive_value()) {
                degenerate += 1;
            }
        }
    }

    let mut history = history;
    if best_value > value {
        history.push((cfg.hillclimb_iters + 1, best_value));
    }
    Ok(OptimumReport {
        best_value,
        best_p,
        best_w_index: best_j,
        best_basis_tag: basis.tag().to_string(),
        best_basis: basis.unitary().clone(),
        history,
        degenerate_optima_count: degenerate.max(1),
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{qsl_bound, BoundSpec};
    use crate::dynamics::{analytic_trajectory, propagate, AnalyticModel, GeneratorSpec, Hamiltonian, Picture};

    fn small_cfg(seed: u64) -> OptimizeConfig<f64> {
        OptimizeConfig {
            basis_samples: 12,
            hillclimb_iters: 60,
            seed,
            ..OptimizeConfig::default()
        }
    }

    fn qudit(tau: f64) -> Trajectory<f64> {
        analytic_trajectory(&AnalyticModel::Qudit4 { hbar: 1.0 }, tau, 8193).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(small_cfg(0).validate().is_ok());
        let mut c = small_cfg(0);
        c.p_grid.retain(|p| *p != Exponent::Finite(2.0));
        assert!(c.validate().is_err());
        let mut c = small_cfg(0);
        c.p_grid.swap(0, 1);
        assert!(c.validate().is_err());
        let c = OptimizeConfig { basis_samples: 0, ..small_cfg(0) };
        assert!(c.validate().is_err());
        let c = OptimizeConfig { hillclimb_starts: 0, ..small_cfg(0) };
        assert!(c.validate().is_err());
    }

    #[test]
    fn w_scan_in_energy_basis() {
        let traj = qudit(3.43);
        let (j, v) = optimize_w(&traj, Exponent::finite(1.0), &Basis::canonical(4), Form::Integral).unwrap();
        assert!(j == 1 || j == 2);
        assert!((v - 1.98).abs() < 0.01, "{v}");
    }

    #[test]
    fn w_scan_dominates_random_weights() {
        use rand::Rng;
        let traj = qudit(1.3);
        let basis = Basis::new(crate::haar::haar_unitary(4, 11), "h").unwrap();
        let mut rng = seeded_rng(5, 0);
        for p in [1.0, 2.0, 3.0] {
            let p = Exponent::finite(p);
            let (_, best) = optimize_w(&traj, p, &basis, Form::Integral).unwrap();
            for _ in 0..50 {
                let w: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
                let spec = BoundSpec::new(p, WeightVector::new(w).unwrap(), basis.clone(), Form::Integral);
                assert!(qsl_bound(&traj, &spec).unwrap().value <= best * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn p_axis() {
        let traj = qudit(1.3);
        let basis = Basis::new(crate::haar::haar_unitary(4, 2), "h").unwrap();
        let grid = OptimizeConfig::<f64>::default().p_grid;
        let w1 = WeightVector::indicator(16, 1).unwrap();
        let (p, v) = optimize_p(&traj, &w1, &basis, Form::Integral, &grid).unwrap();
        assert_eq!(p, grid[0]);
        let direct = qsl_bound(&traj, &BoundSpec::new(Exponent::finite(7.0), w1, basis.clone(), Form::Integral)).unwrap();
        assert!((v - direct.value).abs() < 1e-12);

        let w = WeightVector::indicator(16, 9).unwrap();
        let (p, v) = optimize_p(&traj, &w, &basis, Form::Integral, &grid).unwrap();
        for &q in &grid {
            let r = qsl_bound(&traj, &BoundSpec::new(q, w.clone(), basis.clone(), Form::Integral)).unwrap();
            assert!(r.value <= v);
        }
        let again = qsl_bound(&traj, &BoundSpec::new(p, w, basis, Form::Integral)).unwrap();
        assert_eq!(again.value, v);
    }

    #[test]
    fn p_axis_on_emission_all_ones_regression() {
        let traj = analytic_trajectory(&AnalyticModel::SpontaneousEmission { gamma: 1.0 }, 1.0, 2049).unwrap();
        let w = WeightVector::ones(4);
        let values: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&p| {
                let spec = BoundSpec::new(Exponent::finite(p), w.clone(), Basis::canonical(2), Form::Integral);
                qsl_bound(&traj, &spec).unwrap().value
            })
            .collect();
        let stored = [1.0, 0.997957616455, 0.996428108074];
        for (v, s) in values.iter().zip(stored) {
            assert!((v - s).abs() < 1e-9, "{values:?}");
        }
    }

    #[test]
    fn constant_trajectory_optimizes_to_zero() {
        let gen = GeneratorSpec::new(Hamiltonian::zero(2), Picture::Schrodinger);
        let traj = propagate(&gen, &ComplexMatrix::diag_real(&[0.25, 0.75]), 1.0, 16).unwrap();
        let grid = OptimizeConfig::<f64>::default().p_grid;
        let (_, v) = optimize_p(&traj, &WeightVector::ones(4), &Basis::canonical(2), Form::Integral, &grid).unwrap();
        assert_eq!(v, 0.0);
        let r = optimize_full(&traj, &small_cfg(1)).unwrap();
        assert_eq!(r.best_value, 0.0);
    }

    #[test]
    fn basis_search_finds_tight_qubit_bound() {
        let tau = 2.0;
        let traj = analytic_trajectory(&AnalyticModel::QubitTimeIndependent { hbar: 1.0 }, tau, 2049).unwrap();
        let cfg = OptimizeConfig { basis_samples: 40, hillclimb_iters: 400, ..small_cfg(3) };
        let (_, v, history) =
            optimize_basis(&traj, Exponent::finite(1.0), &WeightVector::indicator(4, 1).unwrap(), Form::Integral, &cfg).unwrap();
        assert!((v - tau).abs() < 1e-6 * tau, "{v}");
        assert!(history.windows(2).all(|h| h[0].1 < h[1].1 && h[0].0 < h[1].0));
    }

    #[test]
    fn frobenius_choice_has_flat_history() {
        let traj = qudit(1.0);
        let (_, _, history) =
            optimize_basis(&traj, Exponent::finite(2.0), &WeightVector::ones(16), Form::Integral, &small_cfg(4)).unwrap();
        assert_eq!(history.len(), 1);
    }

    #[test]
    fn one_dimensional_system_keeps_identity() {
        let gen = GeneratorSpec::new(Hamiltonian::zero(1), Picture::Schrodinger);
        let traj = propagate(&gen, &ComplexMatrix::identity(1), 1.0, 16).unwrap();
        let (b, v, _) =
            optimize_basis(&traj, Exponent::finite(1.0), &WeightVector::ones(1), Form::Integral, &small_cfg(0)).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(b.unitary(), &ComplexMatrix::identity(1));
    }

    #[test]
    fn full_search_is_deterministic_and_reproducible() {
        let traj = qudit(1.5);
        let a = optimize_full(&traj, &small_cfg(9)).unwrap();
        let b = optimize_full(&traj, &small_cfg(9)).unwrap();
        assert_eq!(a.best_value, b.best_value);
        assert_eq!(a.best_basis, b.best_basis);
        assert_eq!(a.history, b.history);
        let spec = BoundSpec::new(
            a.best_p,
            WeightVector::indicator(16, a.best_w_index).unwrap(),
            Basis::new(a.best_basis.clone(), "re").unwrap(),
            Form::Integral,
        );
        let again = qsl_bound(&traj, &spec).unwrap().value;
        assert!((again - a.best_value).abs() <= 1e-10 * a.best_value);
        assert!(a.history.windows(2).all(|h| h[0].1 <= h[1].1));
        assert!(a.best_value <= 1.5 * (1.0 + 1e-6));
        assert!(a.degenerate_optima_count >= 1);
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let traj = qudit(0.8);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| optimize_full(&traj, &small_cfg(2)).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.best_value, b.best_value);
        assert_eq!(a.best_basis, b.best_basis);
    }
}
