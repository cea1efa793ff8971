use std::fs::File;
use std::time::Instant;

use qsl_core::bounds::{delta_diag_basis, qsl_bound, BoundSpec};
use qsl_core::optimize::optimize_full;
use qsl_core::scenarios::{self, Comparison, Scenario};
use qsl_core::{haar_unitary, Basis, ComplexMatrix, QslError, WeightVector};
use rayon::prelude::*;

use crate::output::{write_lines, Line, OptimumExtra, Record};
use crate::request::{BasisSelector, BoundKind, Request};
use crate::Failure;

pub fn execute(req: &Request) -> Result<(), Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = req.jobs {
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().map_err(|e| Failure::Config(e.to_string()))?;
    let points = pool.install(|| {
        req.values
            .par_iter()
            .map(|&v| evaluate_point(req, v))
            .collect::<Result<Vec<_>, Failure>>()
    })?;
    let lines: Vec<Line> = points.into_iter().flatten().collect();
    match &req.out {
        Some(path) => write_lines(&lines, req.format, File::create(path)?),
        None => write_lines(&lines, req.format, std::io::stdout().lock()),
    }
}

fn resolve_basis(sel: &BasisSelector, scenario: &Scenario) -> Result<Basis<f64>, QslError> {
    let n = scenario.trajectory.dim();
    match sel {
        BasisSelector::Canonical => Ok(Basis::canonical(n)),
        BasisSelector::Energy => Ok(scenario.energy_basis.clone().with_tag("energy")),
        BasisSelector::DeltaDiag => delta_diag_basis(&scenario.trajectory),
        BasisSelector::Haar(seed) => Basis::new(haar_unitary(n, *seed), format!("haar:{seed}")),
        BasisSelector::File { path, rows } => {
            let u = ComplexMatrix::from_rows(rows.clone())?;
            if u.dim() != n {
                return Err(QslError::DimensionMismatch { expected: n, found: u.dim() });
            }
            Basis::new(u, format!("file:{path}"))
        }
    }
}

fn comparison_for(kind: BoundKind, scenario: &Scenario) -> Result<Comparison, QslError> {
    let id = scenario.config.id;
    let missing = |what: &str| QslError::Config(format!("{what} is not defined for scenario {id}"));
    match kind {
        BoundKind::Mt => Ok(scenario.comparison("mt").cloned().unwrap_or(
            if scenario.trajectory.generator().is_closed() {
                Comparison::MtClosed
            } else {
                Comparison::MtOpen
            },
        )),
        BoundKind::Dl => Ok(Comparison::Dl),
        BoundKind::Tq => scenario.comparison("tq").cloned().ok_or_else(|| missing("tq")),
        BoundKind::Tc => scenario.comparison("tc").cloned().ok_or_else(|| missing("tc")),
        _ => unreachable!("not a comparison bound"),
    }
}

fn evaluate_point(req: &Request, axis_value: f64) -> Result<Vec<Line>, Failure> {
    let cfg = req.template.clone().with_param(&req.axis, axis_value);
    let scenario = scenarios::build(&cfg)?;
    if let Err(e) = scenario.verify() {
        return Err(Failure::Numerical(e.to_string()));
    }
    let traj = &scenario.trajectory;
    let n2 = traj.dim() * traj.dim();

    let mut lines = Vec::with_capacity(req.bounds.len());
    for &kind in &req.bounds {
        let start = Instant::now();
        let mut record = Record {
            scenario: cfg.id.to_string(),
            axis: req.axis.clone(),
            axis_value,
            bound: kind.name().to_string(),
            value: f64::NAN,
            p: None,
            w_index: None,
            basis: None,
            numerator: None,
            denominator: None,
            degenerate: None,
            wall_time: None,
            seed: cfg.seed,
        };
        let mut optimum = None;
        match kind {
            BoundKind::Int | BoundKind::Sup => {
                let basis = resolve_basis(&req.basis, &scenario)?;
                let spec = BoundSpec::new(req.p, WeightVector::indicator(n2, req.w_index)?, basis, kind.form().unwrap());
                let r = qsl_bound(traj, &spec)?;
                record.value = r.value;
                record.p = Some(req.p.to_string());
                record.w_index = Some(req.w_index);
                record.basis = Some(spec.basis.tag().to_string());
                record.numerator = Some(r.numerator);
                record.denominator = Some(r.denominator);
                record.degenerate = Some(r.degenerate());
            }
            BoundKind::OptInt | BoundKind::OptSup => {
                let form = kind.form().unwrap();
                let cfg = qsl_core::optimize::OptimizeConfig {
                    target_form: form,
                    ..req.optimize.clone()
                };
                let r = optimize_full(traj, &cfg)?;
                let basis = Basis::new(r.best_basis.clone(), r.best_basis_tag.clone())?;
                let spec = BoundSpec::new(r.best_p, WeightVector::indicator(n2, r.best_w_index)?, basis, form);
                let check = qsl_bound(traj, &spec)?;
                record.value = r.best_value;
                record.p = Some(r.best_p.to_string());
                record.w_index = Some(r.best_w_index);
                record.basis = Some(r.best_basis_tag.clone());
                record.numerator = Some(check.numerator);
                record.denominator = Some(check.denominator);
                record.degenerate = Some(r.degenerate_optima_count > 1);
                optimum = Some(OptimumExtra {
                    degenerate_optima_count: r.degenerate_optima_count,
                    evaluations: r.evaluations,
                    history: r.history.clone(),
                });
            }
            _ => {
                record.value = comparison_for(kind, &scenario)?.evaluate(traj)?;
            }
        }
        if !record.value.is_finite() {
            return Err(Failure::Numerical(format!("{} evaluated to {}", kind.name(), record.value)));
        }
        if req.timing {
            record.wall_time = Some(start.elapsed().as_secs_f64());
        }
        lines.push(Line {
            record: record.rounded(),
            optimum,
        });
    }
    Ok(lines)
}
