//! Self-check suite: randomized invariants plus reference values for the
//! preset systems. Shared by the command-line `selftest` and the tests.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{delta_diag_basis, mt_bound_closed, qsl_bound, BoundSpec, Form};
use crate::dynamics::{analytic_trajectory, propagate, AnalyticModel, GeneratorSpec, Hamiltonian, Picture, Trajectory};
use crate::error::{QslError, Result};
use crate::haar::{complex_gaussian, haar_unitary, haar_unitary_from_rng, seeded_rng};
use crate::matrix::{pauli, ComplexMatrix};
use crate::norms::{arrow_norm_of_moduli, WeightVector};
use crate::optimize::optimize_w;
use crate::scalar::Exponent;
use crate::scenarios::{self, ScenarioConfig, ScenarioId};
use crate::states::energy_stddev;
use crate::vectorize::Basis;

type M = ComplexMatrix<f64>;

#[derive(Debug, Clone)]
pub struct SelftestOptions {
    /// Multiplies every tolerance. A negative factor makes every check fail,
    /// which is how the failure path is exercised.
    pub tolerance_factor: f64,
    pub random_systems: usize,
    pub seed: u64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            tolerance_factor: 1.0,
            random_systems: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Largest violation seen by a check and the tolerance it is held to.
struct Measure {
    worst: f64,
    tol: f64,
    detail: String,
}

impl Measure {
    fn new(worst: f64, tol: f64) -> Self {
        Self {
            worst,
            tol,
            detail: String::new(),
        }
    }

    fn with(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// Random Hermitian matrix with complex Gaussian entries.
pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> M {
    M::from_fn(n, |_, _| complex_gaussian(rng)).hermitian_part()
}

/// Random full-rank density matrix `G G^dagger / Tr`.
pub fn random_density(n: usize, rng: &mut ChaCha8Rng) -> M {
    let g = M::from_fn(n, |_, _| complex_gaussian(rng));
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr).hermitian_part()
}

/// Random generator with a static Hamiltonian and up to two jump operators.
pub fn random_generator(n: usize, rng: &mut ChaCha8Rng) -> GeneratorSpec<f64> {
    let mut gen = GeneratorSpec::new(Hamiltonian::Static(random_hermitian(n, rng)), Picture::Schrodinger);
    for _ in 0..rng.random_range(0..=2) {
        let l = M::from_fn(n, |_, _| complex_gaussian(rng));
        gen = gen.with_jump(l, rng.random_range(0.05..0.6));
    }
    gen
}

/// Random exponent from a mix of grid values and continuous draws.
pub fn random_exponent(rng: &mut ChaCha8Rng) -> Exponent<f64> {
    match rng.random_range(0..4) {
        0 => Exponent::Infinite,
        1 => Exponent::finite([1.0, 2.0][rng.random_range(0..2)]),
        _ => Exponent::finite(rng.random_range(1.0..6.0)),
    }
}

/// Random descending weights of length `len`, sometimes with exact ties.
pub fn random_weights(len: usize, rng: &mut ChaCha8Rng) -> WeightVector<f64> {
    let tied = rng.random_bool(0.3);
    let w: Vec<f64> = (0..len)
        .map(|_| {
            let x: f64 = rng.random();
            if tied {
                (x * 3.0).floor() / 2.0
            } else {
                x
            }
        })
        .collect();
    WeightVector::new(w).unwrap_or_else(|_| WeightVector::ones(len))
}

/// A random open system: dimension 2 to 4, random generator and state, time in `[0.2, 2]`.
pub struct RandomSystem {
    pub generator: GeneratorSpec<f64>,
    pub initial: M,
    pub tau: f64,
}

impl RandomSystem {
    pub fn draw(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.random_range(2..=4);
        Self {
            generator: random_generator(n, rng),
            initial: random_density(n, rng),
            tau: rng.random_range(0.2..2.0),
        }
    }

    pub fn trajectory(&self, base_steps: usize) -> Result<Trajectory<f64>> {
        propagate(&self.generator, &self.initial, self.tau, base_steps)
    }
}

/// Evaluates `spec` on the system, refining the grid while the quadrature is under-resolved.
pub fn bound_with_refinement(sys: &RandomSystem, spec: &BoundSpec<f64>) -> Result<(Trajectory<f64>, f64)> {
    let mut steps = 512;
    loop {
        let traj = sys.trajectory(steps)?;
        match qsl_bound(&traj, spec) {
            Err(QslError::UnderResolved { .. }) if steps < 1 << 15 => steps *= 2,
            other => return other.map(|r| (traj, r.value)),
        }
    }
}

/// `max over permutations of sum_k w_k a_{pi(k)}^p`, raised to `1/p`.
pub fn brute_force_arrow_norm(a: &[f64], w: &[f64], p: f64) -> f64 {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let score = |perm: &[usize]| -> f64 { perm.iter().zip(w).map(|(&i, &wk)| wk * a[i].powf(p)).sum() };
    let mut best = score(&perm);
    // Heap's algorithm
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.max(score(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best.powf(1.0 / p)
}

fn check_validity(opts: &SelftestOptions) -> Result<Measure> {
    let mut rng = seeded_rng(opts.seed, 101);
    let mut worst: f64 = 0.0;
    for _ in 0..opts.random_systems {
        let sys = RandomSystem::draw(&mut rng);
        let n = sys.initial.dim();
        let basis = Basis::new(haar_unitary_from_rng(n, &mut rng), "haar")?;
        let p = random_exponent(&mut rng);
        let w = random_weights(n * n, &mut rng);
        let spec = BoundSpec::new(p, w, basis, Form::Integral);
        let (traj, tau_int) = bound_with_refinement(&sys, &spec)?;
        let tau_sup = qsl_bound(&traj, &BoundSpec { form: Form::Supremum, ..spec })?.value;
        let tau = traj.tau();
        // violations of tau >= tau_int >= tau_sup, relative to tau
        worst = worst.max((tau_int - tau) / tau).max((tau_sup - tau_int) / tau);
    }
    Ok(Measure::new(worst, 1e-6).with(format!("{} systems", opts.random_systems)))
}

fn check_arrow_oracle(opts: &SelftestOptions) -> Result<Measure> {
    let mut rng = seeded_rng(opts.seed, 102);
    let mut worst: f64 = 0.0;
    for case in 0..24 {
        let len = if case < 20 { 4 } else { 9 };
        let a: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
        let w = random_weights(len, &mut rng);
        let p = rng.random_range(1.0..5.0);
        let fast = arrow_norm_of_moduli(&a, &w, Exponent::finite(p))?.value;
        let slow = brute_force_arrow_norm(&a, w.entries(), p);
        worst = worst.max((fast - slow).abs() / slow.max(1e-300));
    }
    Ok(Measure::new(worst, 1e-12))
}

fn check_w_reduction(opts: &SelftestOptions) -> Result<Measure> {
    let mut rng = seeded_rng(opts.seed, 103);
    let traj = analytic_trajectory(&AnalyticModel::Qudit4 { hbar: 1.0 }, 1.1, 4097)?;
    let basis = Basis::new(haar_unitary(4, opts.seed), "haar")?;
    let p = Exponent::finite(2.0);
    let (_, best) = optimize_w(&traj, p, &basis, Form::Integral)?;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let w = random_weights(16, &mut rng);
        let v = qsl_bound(&traj, &BoundSpec::new(p, w, basis.clone(), Form::Integral))?.value;
        worst = worst.max((v - best) / best);
    }
    Ok(Measure::new(worst.max(0.0), 1e-12).with("500 random weights"))
}

fn check_basis_invariance(opts: &SelftestOptions) -> Result<Measure> {
    let traj = analytic_trajectory(&AnalyticModel::Qudit4 { hbar: 1.0 }, 2.0, 16385)?;
    let eval = |p: f64, j: usize, seed: Option<u64>| -> Result<f64> {
        let basis = match seed {
            Some(s) => Basis::new(haar_unitary(4, s), "haar")?,
            None => Basis::canonical(4),
        };
        let spec = BoundSpec::new(Exponent::finite(p), WeightVector::indicator(16, j)?, basis, Form::Integral);
        Ok(qsl_bound(&traj, &spec)?.value)
    };
    let reference = eval(2.0, 16, None)?;
    let mut spread: f64 = 0.0;
    let mut dependent: f64 = 0.0;
    let one = eval(1.0, 1, None)?;
    for s in 0..20 {
        spread = spread.max((eval(2.0, 16, Some(opts.seed + s))? - reference).abs() / reference);
        dependent = dependent.max((eval(1.0, 1, Some(opts.seed + s))? - one).abs() / one);
    }
    // the (1, 1_1) choice must move with the basis; a flat response counts as a violation
    let worst = if dependent > 1e-3 { spread } else { f64::INFINITY };
    Ok(Measure::new(worst, 1e-8).with(format!("(1, 1_1) spread {dependent:.3}")))
}

fn check_energy_identity(_: &SelftestOptions) -> Result<Measure> {
    let traj = analytic_trajectory(&AnalyticModel::Qudit4 { hbar: 1.0 }, 1.7, 4097)?;
    let spec = BoundSpec::new(Exponent::finite(2.0), WeightVector::ones(16), Basis::canonical(4), Form::Integral);
    let r = qsl_bound(&traj, &spec)?;
    let de = energy_stddev(traj.initial(), &traj.generator().hamiltonian.at(0.0))?;
    Ok(Measure::new((r.denominator - 2f64.sqrt() * de).abs(), 1e-8))
}

fn check_qubit_tightness(_: &SelftestOptions) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for tau in [0.3f64, 1.0, 2.0, 3.0] {
        let traj = analytic_trajectory(&AnalyticModel::QubitTimeIndependent { hbar: 1.0 }, tau, 4097)?;
        let bd = delta_diag_basis(&traj)?;
        let w = WeightVector::indicator(4, 1)?;
        let int = qsl_bound(&traj, &BoundSpec::new(Exponent::finite(1.0), w.clone(), bd.clone(), Form::Integral))?;
        let sup = qsl_bound(&traj, &BoundSpec::new(Exponent::finite(1.0), w, bd, Form::Supremum))?;
        worst = worst
            .max((int.value - tau).abs() / tau)
            .max((sup.value - 2.0 * (tau / 2.0).sin()).abs() / sup.value);
    }
    Ok(Measure::new(worst, 1e-6))
}

fn check_qubit_mt(_: &SelftestOptions) -> Result<Measure> {
    let traj = analytic_trajectory(&AnalyticModel::QubitTimeIndependent { hbar: 1.0 }, 4.0 * PI / 3.0, 4097)?;
    Ok(Measure::new((mt_bound_closed(&traj)? - 2.0 * PI / 3.0).abs(), 1e-6))
}

fn check_qudit_energy_basis(_: &SelftestOptions) -> Result<Measure> {
    let traj = analytic_trajectory(&AnalyticModel::Qudit4 { hbar: 1.0 }, scenarios::TAU_C, 8193)?;
    let (j, v) = optimize_w(&traj, Exponent::finite(1.0), &Basis::canonical(4), Form::Integral)?;
    let worst = if j <= 2 { (v - 1.98).abs() } else { f64::INFINITY };
    Ok(Measure::new(worst, 0.01).with(format!("value {v:.4} at j = {j}")))
}

fn check_emission(_: &SelftestOptions) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for gamma in [0.05f64, 0.5, 1.0, 2.5, 5.0] {
        let traj = analytic_trajectory(&AnalyticModel::SpontaneousEmission { gamma }, 1.0, 4097)?;
        let w = WeightVector::indicator(4, 1)?;
        let sup = qsl_bound(&traj, &BoundSpec::new(Exponent::finite(1.0), w.clone(), Basis::canonical(2), Form::Supremum))?;
        let int = qsl_bound(&traj, &BoundSpec::new(Exponent::finite(1.0), w, Basis::canonical(2), Form::Integral))?;
        // errors in units of their tolerances: 1e-8 for the supremum form, 1e-6 for the integral form
        worst = worst
            .max((sup.value - (1.0 - (-gamma).exp()) / gamma).abs() / 1e-8)
            .max((int.value - 1.0).abs() / 1e-6);
    }
    Ok(Measure::new(worst, 1.0))
}

fn check_quantumness_formulas(_: &SelftestOptions) -> Result<Measure> {
    let dephasing = AnalyticModel::DephasingObservable { gamma: 1.0 };
    let coherent = AnalyticModel::CoherenceState { gamma: 1.0 };
    let (y, z) = (pauli::y::<f64>(), pauli::z::<f64>());
    let mut worst: f64 = 0.0;
    for k in 0..=200 {
        let t = 2.0 * k as f64 / 200.0;
        let q = crate::bounds::quantumness(&y, &dephasing.sample(t))?;
        let c = crate::bounds::coherence(&coherent.sample(t), &z)?;
        worst = worst
            .max((q - 16.0 * (-t).exp() * (2.0 * t).sin().powi(2)).abs())
            .max((c - (-t / 2.0).exp() * (2.0 * t).sin().abs()).abs());
    }
    Ok(Measure::new(worst, 1e-8))
}

fn check_spin_one(_: &SelftestOptions) -> Result<Measure> {
    let (sx, sy, sz) = scenarios::spin1();
    let comm = &sx.commutator(&sy) - &sz.scale(crate::scalar::cplx(0.0, 1.0));
    let casimir = &(&(&(&sx * &sx) + &(&sy * &sy)) + &(&sz * &sz)) - &M::identity(3).scale_real(2.0);
    Ok(Measure::new(comm.max_abs().max(casimir.max_abs()), 1e-12))
}

fn check_scenarios(_: &SelftestOptions) -> Result<Measure> {
    let mut worst: f64 = 0.0;
    for id in ScenarioId::ALL {
        let mut cfg = ScenarioConfig::new(id, 1.0).with_grid_points(1025);
        if id == ScenarioId::NvCenter {
            cfg = cfg.with_param("ratio", 2.0);
        }
        for c in scenarios::build(&cfg)?.checks {
            worst = worst.max(c.deviation);
        }
    }
    Ok(Measure::new(worst, scenarios::CHECK_TOLERANCE))
}

type Check = fn(&SelftestOptions) -> Result<Measure>;

const CHECKS: [(&str, Check); 13] = [
    ("randomized validity tau >= tau_int >= tau_sup", check_validity),
    ("arrow norm equals brute-force permutation maximum", check_arrow_oracle),
    ("indicator weights dominate random weights", check_w_reduction),
    ("(2, all-ones) basis invariance with (1, 1_1) dependence", check_basis_invariance),
    ("closed-system denominator equals sqrt(2) energy spread", check_energy_identity),
    ("qubit bounds tight in the difference eigenbasis", check_qubit_tightness),
    ("qubit MT bound at 4 pi / 3", check_qubit_mt),
    ("qudit energy-basis bound at tau_c", check_qudit_energy_basis),
    ("spontaneous emission closed forms", check_emission),
    ("quantumness and coherence closed forms", check_quantumness_formulas),
    ("spin-1 algebra", check_spin_one),
    ("scenario trajectories match closed forms", check_scenarios),
    ("self-test tolerance hook is inactive", check_hook),
];

fn check_hook(opts: &SelftestOptions) -> Result<Measure> {
    Ok(Measure::new(0.0, 1.0).with(format!("factor {}", opts.tolerance_factor)))
}

/// Runs every check; the order is fixed.
pub fn run_selftest(opts: &SelftestOptions) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| match check(opts) {
            Ok(m) => {
                let tol = m.tol * opts.tolerance_factor;
                let passed = m.worst <= tol;
                let mut detail = format!("worst {:.3e} (tol {:.1e})", m.worst, tol);
                if !m.detail.is_empty() {
                    detail = format!("{detail}; {}", m.detail);
                }
                CheckOutcome {
                    name: name.to_string(),
                    passed,
                    detail,
                }
            }
            Err(e) => CheckOutcome {
                name: name.to_string(),
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_oracle_small_case() {
        let v = brute_force_arrow_norm(&[0.1, 0.5, 0.3], &[1.0, 0.5, 0.0], 1.0);
        assert!((v - (0.5 + 0.15)).abs() < 1e-15);
    }

    #[test]
    fn random_states_are_densities() {
        let mut rng = seeded_rng(1, 0);
        for n in 2..=4 {
            crate::spectral::check_density(&random_density(n, &mut rng)).unwrap();
            random_generator(n, &mut rng).validate().unwrap();
        }
    }

    #[test]
    fn default_run_passes() {
        let report = run_selftest(&SelftestOptions::default());
        for c in &report {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn corrupted_tolerance_fails_every_check() {
        let opts = SelftestOptions {
            tolerance_factor: -1.0,
            random_systems: 2,
            seed: 0,
        };
        let report = run_selftest(&opts);
        assert_eq!(report.len(), CHECKS.len());
        assert!(report.iter().all(|c| !c.passed));
    }
}
