//! Preset systems: qubit and qudit under static Hamiltonians, spontaneous
//! emission, an NV-center spin gate, and the dephasing and coherence models.
//!
//! Scenarios work in `f64`. Parameter keys (all optional unless noted):
//!
//! | id               | keys                                                        |
//! |------------------|-------------------------------------------------------------|
//! | `qubit_ti`       | `tau` (required), `hbar`                                    |
//! | `qudit4`         | `tau` (required), `hbar`                                    |
//! | `spont_emission` | `tau` (required), `gamma`                                   |
//! | `nv_center`      | `tau` (required), `b1` or `ratio` (= B0/B1, one required), `b0`, `d`, `gamma_e` |
//! | `dephasing`      | `tau` (required), `gamma`                                   |
//! | `coherence_gen`  | `tau` (required), `gamma`                                   |
//!
//! Rates are in 1/ns, fields in tesla, `d` in rad/ns and `gamma_e` in
//! rad/(ns T); `gamma` and `hbar` default to 1.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::bounds::{dl_bound, mt_bound_closed, t_c_bound, t_q_bound};
use crate::dynamics::{
    analytic_trajectory, propagate, AnalyticModel, GeneratorSpec, Hamiltonian, Picture, Trajectory,
};
use crate::error::{QslError, Result};
use crate::matrix::{pauli, ComplexMatrix};
use crate::scalar::{cplx, creal};
use crate::spectral::unitary_exp;
use crate::states::root_fidelity;
use crate::vectorize::Basis;

type M = ComplexMatrix<f64>;

/// Evolution time up to which the qudit bound is saturated.
pub const TAU_C: f64 = 3.43;
/// Largest deviation between integrated and closed-form samples.
pub const CHECK_TOLERANCE: f64 = 1e-7;
pub const DEFAULT_GRID_POINTS: usize = 16385;

pub const NV_D: f64 = 2.0 * PI * 2.87;
pub const NV_GAMMA_E: f64 = 2.0 * PI * 28.0345;
pub const NV_B0: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioId {
    QubitTi,
    Qudit4,
    SpontEmission,
    NvCenter,
    Dephasing,
    CoherenceGen,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] = [
        ScenarioId::QubitTi,
        ScenarioId::Qudit4,
        ScenarioId::SpontEmission,
        ScenarioId::NvCenter,
        ScenarioId::Dephasing,
        ScenarioId::CoherenceGen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::QubitTi => "qubit_ti",
            ScenarioId::Qudit4 => "qudit4",
            ScenarioId::SpontEmission => "spont_emission",
            ScenarioId::NvCenter => "nv_center",
            ScenarioId::Dephasing => "dephasing",
            ScenarioId::CoherenceGen => "coherence_gen",
        }
    }

    /// Keys accepted in the parameter map.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            ScenarioId::QubitTi | ScenarioId::Qudit4 => &["tau", "hbar"],
            ScenarioId::SpontEmission | ScenarioId::Dephasing | ScenarioId::CoherenceGen => &["tau", "gamma"],
            ScenarioId::NvCenter => &["tau", "b0", "b1", "ratio", "d", "gamma_e"],
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = QslError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| QslError::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub id: ScenarioId,
    pub params: BTreeMap<String, f64>,
    pub grid_points: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn new(id: ScenarioId, tau: f64) -> Self {
        Self {
            id,
            params: BTreeMap::from([("tau".to_string(), tau)]),
            grid_points: DEFAULT_GRID_POINTS,
            seed: 0,
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_grid_points(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn tau(&self) -> Result<f64> {
        self.params
            .get("tau")
            .copied()
            .ok_or_else(|| QslError::Config(format!("scenario {} requires tau", self.id)))
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, v) in &self.params {
            if !self.id.keys().contains(&k.as_str()) {
                return Err(QslError::Config(format!(
                    "unknown parameter `{k}` for scenario {} (accepted: {})",
                    self.id,
                    self.id.keys().join(", ")
                )));
            }
            if !v.is_finite() {
                return Err(QslError::Config(format!("parameter {k} must be finite")));
            }
        }
        let tau = self.tau()?;
        if tau <= 0.0 {
            return Err(QslError::Config(format!("tau must be positive, got {tau}")));
        }
        if self.grid_points < 64 {
            return Err(QslError::Config(format!("grid_points must be at least 64, got {}", self.grid_points)));
        }
        for key in ["gamma", "hbar"] {
            if let Some(&v) = self.params.get(key) {
                let ok = if key == "gamma" { v >= 0.0 } else { v > 0.0 };
                if !ok {
                    return Err(QslError::Config(format!("parameter {key} out of range: {v}")));
                }
            }
        }
        if self.id == ScenarioId::NvCenter {
            match (self.params.get("b1"), self.params.get("ratio")) {
                (None, None) => return Err(QslError::Config("nv_center requires b1 or ratio".into())),
                (Some(_), Some(_)) => return Err(QslError::Config("give only one of b1 and ratio".into())),
                (None, Some(&r)) if r <= 0.0 => {
                    return Err(QslError::Config(format!("ratio must be positive, got {r}")))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Reference bounds a scenario is compared against.
#[derive(Debug, Clone, PartialEq)]
pub enum Comparison {
    /// Closed-system Mandelstam-Tamm bound.
    MtClosed,
    /// The Hilbert-Schmidt analogue reported with the DL bound.
    MtOpen,
    Dl,
    /// Quantumness bound against the initial observable.
    Tq { a0: M },
    /// Coherence bound in the eigenbasis of `a`.
    Tc { a: M },
}

impl Comparison {
    pub fn name(&self) -> &'static str {
        match self {
            Comparison::MtClosed => "mt",
            Comparison::MtOpen => "mt_open",
            Comparison::Dl => "dl",
            Comparison::Tq { .. } => "tq",
            Comparison::Tc { .. } => "tc",
        }
    }

    pub fn evaluate(&self, traj: &Trajectory<f64>) -> Result<f64> {
        match self {
            Comparison::MtClosed => mt_bound_closed(traj),
            Comparison::MtOpen => Ok(dl_bound(traj)?.mt_open),
            Comparison::Dl => Ok(dl_bound(traj)?.value),
            Comparison::Tq { a0 } => t_q_bound(traj, a0),
            Comparison::Tc { a } => t_c_bound(traj, a),
        }
    }
}

/// A closed-form check and how far the integrated dynamics is from it.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticCheck {
    pub name: String,
    pub deviation: f64,
}

impl AnalyticCheck {
    pub fn passed(&self) -> bool {
        self.deviation <= CHECK_TOLERANCE
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub trajectory: Trajectory<f64>,
    pub comparisons: Vec<Comparison>,
    pub checks: Vec<AnalyticCheck>,
    /// Eigenbasis of the Hamiltonian at `t = 0`.
    pub energy_basis: Basis<f64>,
}

impl Scenario {
    pub fn tau(&self) -> f64 {
        self.trajectory.tau()
    }

    /// Looks up a comparison by name; `mt` resolves to the open-system variant
    /// when the scenario has no closed-system one.
    pub fn comparison(&self, name: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.name() == name).or_else(|| {
            if name == "mt" {
                self.comparisons.iter().find(|c| c.name() == "mt_open")
            } else {
                None
            }
        })
    }

    /// Errors if any attached check fails.
    pub fn verify(&self) -> Result<()> {
        for c in &self.checks {
            if !c.passed() {
                return Err(QslError::InvalidTrajectory(format!(
                    "check {} deviates by {:e}",
                    c.name, c.deviation
                )));
            }
        }
        Ok(())
    }
}

/// Spin-1 matrices `(S_x, S_y, S_z)` in the basis `m_s = +1, 0, -1`.
pub fn spin1() -> (M, M, M) {
    let s = 1.0 / SQRT_2;
    let sx = M::from_real_rows(&[&[0.0, s, 0.0], &[s, 0.0, s], &[0.0, s, 0.0]]).expect("3x3");
    let i = cplx(0.0, s);
    let z = creal(0.0);
    let sy = M::from_rows(vec![vec![z, -i, z], vec![i, z, -i], vec![z, i, z]]).expect("3x3");
    let sz = M::diag_real(&[1.0, 0.0, -1.0]);
    (sx, sy, sz)
}

/// NV-center Hamiltonians before and after the control switch at `tau / 2`.
pub fn nv_hamiltonians(d: f64, gamma_e: f64, b0: f64, b1: f64) -> (M, M) {
    let (sx, sy, sz) = spin1();
    let mut h0 = (&sz * &sz).scale_real(d);
    h0.add_scaled(creal(gamma_e * b0), &sz);
    let mut first = h0.clone();
    first.add_scaled(creal(gamma_e * b1), &sx);
    let mut second = h0;
    second.add_scaled(creal(gamma_e * b1), &sy);
    (first, second)
}

/// `|<psi_0|psi_tau>|` for the qudit preset.
pub fn qudit4_overlap(tau: f64) -> f64 {
    use crate::dynamics::{QUDIT4_ENERGIES, QUDIT4_WEIGHTS};
    QUDIT4_WEIGHTS
        .iter()
        .zip(QUDIT4_ENERGIES)
        .map(|(&w, e)| cplx(w * (e * tau).cos(), -w * (e * tau).sin()))
        .sum::<num_complex::Complex<f64>>()
        .norm()
}

fn max_deviation(traj: &Trajectory<f64>, exact: impl Fn(f64) -> M) -> f64 {
    traj.times()
        .iter()
        .zip(traj.samples())
        .map(|(&t, s)| (s - &exact(t)).frobenius_norm())
        .fold(0.0, f64::max)
}

fn model_check(model: &AnalyticModel<f64>, tau: f64, base_steps: usize) -> Result<AnalyticCheck> {
    let gen = model.generator();
    let integrated = propagate(&gen, &model.sample(0.0), tau, base_steps)?;
    Ok(AnalyticCheck {
        name: format!("{}_closed_form", model.name()),
        deviation: max_deviation(&integrated, |t| model.sample(t)),
    })
}

/// Builds the trajectory, comparison set and closed-form checks for `cfg`.
pub fn build(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let tau = cfg.tau()?;
    let grid = cfg.grid_points;
    let base_steps = 64;
    let analytic = |model: AnalyticModel<f64>, comparisons: Vec<Comparison>| -> Result<Scenario> {
        let trajectory = analytic_trajectory(&model, tau, grid)?;
        let checks = vec![model_check(&model, tau, base_steps)?];
        let energy_basis = Basis::eigenbasis(&model.generator().hamiltonian.at(0.0), "energy")?;
        Ok(Scenario {
            config: cfg.clone(),
            trajectory,
            comparisons,
            checks,
            energy_basis,
        })
    };
    match cfg.id {
        ScenarioId::QubitTi => analytic(
            AnalyticModel::QubitTimeIndependent { hbar: cfg.get("hbar", 1.0) },
            vec![Comparison::MtClosed],
        ),
        ScenarioId::Qudit4 => {
            let mut s = analytic(AnalyticModel::Qudit4 { hbar: cfg.get("hbar", 1.0) }, vec![Comparison::MtClosed])?;
            let t = &s.trajectory;
            let hbar = cfg.get("hbar", 1.0);
            s.checks.push(AnalyticCheck {
                name: "qudit4_fidelity".into(),
                deviation: (root_fidelity(t.initial(), t.last())? - qudit4_overlap(tau / hbar)).abs(),
            });
            Ok(s)
        }
        ScenarioId::SpontEmission => analytic(
            AnalyticModel::SpontaneousEmission { gamma: cfg.get("gamma", 1.0) },
            vec![Comparison::Dl, Comparison::MtOpen],
        ),
        ScenarioId::Dephasing => analytic(
            AnalyticModel::DephasingObservable { gamma: cfg.get("gamma", 1.0) },
            vec![Comparison::Tq { a0: pauli::y() }],
        ),
        ScenarioId::CoherenceGen => analytic(
            AnalyticModel::CoherenceState { gamma: cfg.get("gamma", 1.0) },
            vec![Comparison::Tc { a: pauli::z() }],
        ),
        ScenarioId::NvCenter => build_nv(cfg, tau),
    }
}

fn build_nv(cfg: &ScenarioConfig, tau: f64) -> Result<Scenario> {
    let b0 = cfg.get("b0", NV_B0);
    let b1 = match cfg.params.get("b1") {
        Some(&b1) => b1,
        None => b0 / cfg.get("ratio", f64::NAN),
    };
    let (first, second) = nv_hamiltonians(cfg.get("d", NV_D), cfg.get("gamma_e", NV_GAMMA_E), b0, b1);
    let half = tau / 2.0;
    let hamiltonian = Hamiltonian::piecewise(vec![half], vec![first.clone(), second.clone()])?;
    let gen = GeneratorSpec::new(hamiltonian, Picture::Schrodinger);
    let psi0 = [creal(1.0), creal(0.0), creal(0.0)];
    let rho0 = M::projector(&psi0);
    // the switch time is forced onto the grid by the propagator
    let trajectory = propagate(&gen, &rho0, tau, cfg.grid_points.saturating_sub(1).max(2))?;

    let minus_i = |h: &M| h.scale(cplx(0.0, -1.0));
    let u_half = unitary_exp(&minus_i(&first), half)?;
    let exact = |t: f64| -> M {
        let u = if t < half {
            unitary_exp(&minus_i(&first), t).expect("Hermitian")
        } else {
            &unitary_exp(&minus_i(&second), t - half).expect("Hermitian") * &u_half
        };
        &(&u * &rho0) * &u.adjoint()
    };
    let checks = vec![AnalyticCheck {
        name: "nv_center_piecewise_exponential".into(),
        deviation: max_deviation(&trajectory, exact),
    }];
    let energy_basis = Basis::eigenbasis(&nv_hamiltonians(cfg.get("d", NV_D), cfg.get("gamma_e", NV_GAMMA_E), b0, 0.0).0, "energy")?;
    Ok(Scenario {
        config: cfg.clone(),
        trajectory,
        comparisons: vec![Comparison::MtClosed],
        checks,
        energy_basis,
    })
}

/// Parses `key = value` lines; `#` starts a comment and blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| QslError::Config(format!("line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(QslError::Config(format!("line {}: empty key or value", i + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(QslError::Config(format!("line {}: duplicate key `{k}`", i + 1)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{qsl_bound, BoundSpec, Form};
    use crate::norms::WeightVector;
    use crate::scalar::Exponent;

    fn cfg(id: ScenarioId, tau: f64) -> ScenarioConfig {
        ScenarioConfig::new(id, tau).with_grid_points(1025)
    }

    #[test]
    fn ids_round_trip() {
        for id in ScenarioId::ALL {
            assert_eq!(id.name().parse::<ScenarioId>().unwrap(), id);
        }
        assert!(matches!("qutrit".parse::<ScenarioId>(), Err(QslError::UnknownScenario(_))));
    }

    #[test]
    fn spin_one_algebra() {
        let (sx, sy, sz) = spin1();
        let comm = sx.commutator(&sy);
        assert!((&comm - &sz.scale(cplx(0.0, 1.0))).max_abs() < 1e-12);
        let casimir = &(&(&sx * &sx) + &(&sy * &sy)) + &(&sz * &sz);
        assert!((&casimir - &M::identity(3).scale_real(2.0)).max_abs() < 1e-12);
    }

    #[test]
    fn every_scenario_matches_its_checks() {
        for id in ScenarioId::ALL {
            let mut c = cfg(id, 1.0);
            if id == ScenarioId::NvCenter {
                c = c.with_param("ratio", 2.0);
            }
            let s = build(&c).unwrap();
            assert!(!s.checks.is_empty());
            for check in &s.checks {
                assert!(check.passed(), "{id}: {} = {:e}", check.name, check.deviation);
            }
            assert!(s.verify().is_ok());
            for comp in &s.comparisons {
                let v = comp.evaluate(&s.trajectory).unwrap();
                assert!(v.is_finite() && v >= 0.0, "{id} {}", comp.name());
            }
        }
    }

    #[test]
    fn closed_systems_stay_pure() {
        for (id, extra) in [(ScenarioId::QubitTi, None), (ScenarioId::NvCenter, Some(("ratio", 0.5)))] {
            let mut c = cfg(id, 1.3);
            if let Some((k, v)) = extra {
                c = c.with_param(k, v);
            }
            let s = build(&c).unwrap();
            for rho in s.trajectory.samples() {
                let purity = (rho * rho).trace().re;
                assert!((purity - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn emission_has_tied_extremes() {
        let s = build(&cfg(ScenarioId::SpontEmission, 1.0)).unwrap();
        let d = s.trajectory.delta();
        let expect = (1.0 - (-1f64).exp()) / 2.0;
        assert!((d[(0, 0)].norm() - expect).abs() < 1e-14);
        assert!((d[(1, 1)].norm() - expect).abs() < 1e-14);
        let spec = BoundSpec::new(Exponent::finite(1.0), WeightVector::indicator(4, 1).unwrap(), Basis::canonical(2), Form::Supremum);
        let r = qsl_bound(&s.trajectory, &spec).unwrap();
        assert!(r.degenerate());
        assert!((r.numerator - expect).abs() < 1e-14);
        assert_eq!(r.candidates_evaluated, 2);
    }

    #[test]
    fn qudit_overlap_at_zero() {
        assert!((qudit4_overlap(0.0) - 1.0).abs() < 1e-15);
        let s = build(&cfg(ScenarioId::Qudit4, 0.7)).unwrap();
        assert!(s.checks.iter().any(|c| c.name == "qudit4_fidelity" && c.passed()));
    }

    #[test]
    fn nv_without_drive_is_stationary() {
        let s = build(&cfg(ScenarioId::NvCenter, 1.0).with_param("b1", 0.0)).unwrap();
        assert!(s.trajectory.delta().max_abs() < 1e-12);
        assert_eq!(Comparison::MtClosed.evaluate(&s.trajectory).unwrap(), 0.0);
        let spec = BoundSpec::new(Exponent::finite(2.0), WeightVector::ones(9), Basis::canonical(3), Form::Integral);
        assert_eq!(qsl_bound(&s.trajectory, &spec).unwrap().value, 0.0);
    }

    #[test]
    fn nv_switch_lands_on_grid() {
        let s = build(&cfg(ScenarioId::NvCenter, 0.9).with_param("ratio", 1.0)).unwrap();
        assert_eq!(s.trajectory.breaks().len(), 1);
        let t = s.trajectory.times()[s.trajectory.breaks()[0].index];
        assert_eq!(t, 0.45);
    }

    #[test]
    fn invalid_configs() {
        assert!(build(&ScenarioConfig { params: BTreeMap::new(), ..cfg(ScenarioId::QubitTi, 1.0) }).is_err());
        assert!(build(&cfg(ScenarioId::QubitTi, -1.0)).is_err());
        assert!(build(&cfg(ScenarioId::QubitTi, 1.0).with_param("gamma", 1.0)).is_err());
        assert!(build(&cfg(ScenarioId::SpontEmission, 1.0).with_param("gamma", f64::NAN)).is_err());
        assert!(build(&cfg(ScenarioId::NvCenter, 1.0)).is_err());
        assert!(build(&cfg(ScenarioId::NvCenter, 1.0).with_param("b1", 0.1).with_param("ratio", 2.0)).is_err());
        assert!(build(&cfg(ScenarioId::QubitTi, 1.0).with_grid_points(10)).is_err());
    }

    #[test]
    fn mt_alias_resolves_per_scenario() {
        let s = build(&cfg(ScenarioId::SpontEmission, 1.0)).unwrap();
        assert_eq!(s.comparison("mt").unwrap().name(), "mt_open");
        let s = build(&cfg(ScenarioId::QubitTi, 1.0)).unwrap();
        assert_eq!(s.comparison("mt").unwrap().name(), "mt");
        assert!(s.comparison("tq").is_none());
    }

    #[test]
    fn config_text() {
        let text = "# header\nscenario = qubit_ti\n tau = 2.5  # trailing\n\n";
        let m = parse_config(text).unwrap();
        assert_eq!(m["scenario"], "qubit_ti");
        assert_eq!(m["tau"], "2.5");
        assert!(parse_config("tau 2").is_err());
        assert!(parse_config("tau = 1\ntau = 2").is_err());
        assert!(parse_config("= 2").is_err());
    }
}
