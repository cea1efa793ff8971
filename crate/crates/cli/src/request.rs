use std::collections::BTreeMap;
use std::path::PathBuf;

use qsl_core::bounds::Form;
use qsl_core::optimize::OptimizeConfig;
use qsl_core::scenarios::{parse_config, ScenarioConfig, ScenarioId};
use qsl_core::{Exponent, C};

use crate::{EvalArgs, Failure, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Run,
    Sweep,
    Optimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Int,
    Sup,
    OptInt,
    OptSup,
    Mt,
    Dl,
    Tq,
    Tc,
}

impl BoundKind {
    pub fn parse(s: &str) -> Result<Self, Failure> {
        Ok(match s {
            "int" => BoundKind::Int,
            "sup" => BoundKind::Sup,
            "opt_int" => BoundKind::OptInt,
            "opt_sup" => BoundKind::OptSup,
            "mt" => BoundKind::Mt,
            "dl" => BoundKind::Dl,
            "tq" => BoundKind::Tq,
            "tc" => BoundKind::Tc,
            other => return Err(Failure::Config(format!("unknown bound `{other}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Int => "int",
            BoundKind::Sup => "sup",
            BoundKind::OptInt => "opt_int",
            BoundKind::OptSup => "opt_sup",
            BoundKind::Mt => "mt",
            BoundKind::Dl => "dl",
            BoundKind::Tq => "tq",
            BoundKind::Tc => "tc",
        }
    }

    pub fn form(self) -> Option<Form> {
        match self {
            BoundKind::Int | BoundKind::OptInt => Some(Form::Integral),
            BoundKind::Sup | BoundKind::OptSup => Some(Form::Supremum),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BasisSelector {
    Canonical,
    Energy,
    DeltaDiag,
    Haar(u64),
    /// Rows of the unitary as read from a file.
    File { path: String, rows: Vec<Vec<C<f64>>> },
}

impl BasisSelector {
    pub fn parse(s: &str) -> Result<Self, Failure> {
        match s {
            "canonical" => Ok(BasisSelector::Canonical),
            "energy" => Ok(BasisSelector::Energy),
            "delta_diag" => Ok(BasisSelector::DeltaDiag),
            _ => {
                if let Some(seed) = s.strip_prefix("haar:") {
                    let seed = seed
                        .parse()
                        .map_err(|_| Failure::Config(format!("invalid Haar seed in `{s}`")))?;
                    Ok(BasisSelector::Haar(seed))
                } else if let Some(path) = s.strip_prefix("file:") {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Failure::Config(format!("cannot read basis file {path}: {e}")))?;
                    Ok(BasisSelector::File {
                        path: path.to_string(),
                        rows: parse_matrix(&text)?,
                    })
                } else {
                    Err(Failure::Config(format!("unknown basis selector `{s}`")))
                }
            }
        }
    }
}

/// One row per line, entries separated by whitespace; an entry is `re` or `re,im`.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<C<f64>>>, Failure> {
    let bad = |tok: &str| Failure::Config(format!("invalid matrix entry `{tok}`"));
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                let (re, im) = tok.split_once(',').unwrap_or((tok, "0"));
                Ok(C::new(re.parse().map_err(|_| bad(tok))?, im.parse().map_err(|_| bad(tok))?))
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Failure::Config("basis file holds no rows".into()));
    }
    Ok(rows)
}

/// Parses `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
pub fn parse_values(s: &str) -> Result<Vec<f64>, Failure> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Failure::Config(format!("invalid axis value `{t}`")))
    };
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Failure::Config(format!("expected START:STOP:COUNT, got `{s}`")));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Failure::Config(format!("invalid count in `{s}`")))?;
        match count {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect(),
        }
    } else {
        s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(Failure::Config("no axis values".into()));
    }
    Ok(values)
}

#[derive(Debug, Clone)]
pub struct Request {
    pub template: ScenarioConfig,
    pub axis: String,
    pub values: Vec<f64>,
    pub bounds: Vec<BoundKind>,
    pub p: Exponent<f64>,
    pub w_index: usize,
    pub basis: BasisSelector,
    pub optimize: OptimizeConfig<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub timing: bool,
    pub jobs: Option<usize>,
}

/// Keys of the config file that are not scenario parameters.
const REQUEST_KEYS: [&str; 14] = [
    "scenario", "bounds", "p", "w_index", "basis", "grid_points", "seed", "jobs", "format", "axis", "values", "samples",
    "iters", "starts",
];

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, Failure> {
    v.trim().parse().map_err(|_| config_err(format!("invalid value `{v}` for `{key}`")))
}

impl Request {
    pub fn resolve(args: &EvalArgs, sweep: Option<(Option<String>, Option<String>)>, mode: Mode) -> Result<Self, Failure> {
        let file: BTreeMap<String, String> = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        let from_file = |k: &str| file.get(k).map(String::as_str);

        let scenario = args
            .scenario
            .as_deref()
            .or(from_file("scenario"))
            .ok_or_else(|| config_err("--scenario is required"))?;
        let id: ScenarioId = scenario.parse()?;

        let mut params = BTreeMap::new();
        for (k, v) in file.iter().filter(|(k, _)| !REQUEST_KEYS.contains(&k.as_str())) {
            params.insert(k.clone(), parse_num::<f64>(k, v)?);
        }
        for kv in &args.params {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| config_err(format!("expected KEY=VALUE, got `{kv}`")))?;
            params.insert(k.trim().to_string(), parse_num::<f64>(k, v)?);
        }
        if let Some(tau) = args.tau {
            params.insert("tau".into(), tau);
        }

        let mut template = ScenarioConfig::new(id, f64::NAN);
        template.params = params;
        if let Some(g) = args.grid_points.map(Ok).or_else(|| from_file("grid_points").map(|v| parse_num("grid_points", v))) {
            template.grid_points = g?;
        }
        let seed = match args.seed {
            Some(s) => s,
            None => from_file("seed").map(|v| parse_num("seed", v)).transpose()?.unwrap_or(0),
        };
        template.seed = seed;

        let (axis, values) = match sweep {
            Some((axis, values)) => {
                let axis = axis
                    .or_else(|| from_file("axis").map(str::to_string))
                    .ok_or_else(|| config_err("--axis is required for sweep"))?;
                if !id.keys().contains(&axis.as_str()) {
                    return Err(config_err(format!(
                        "axis `{axis}` is not a parameter of {id} (expected one of {})",
                        id.keys().join(", ")
                    )));
                }
                let values = values
                    .or_else(|| from_file("values").map(str::to_string))
                    .ok_or_else(|| config_err("--values is required for sweep"))?;
                (axis, parse_values(&values)?)
            }
            None => {
                let tau = *template
                    .params
                    .get("tau")
                    .ok_or_else(|| config_err(format!("scenario {id} needs tau (--tau or --param tau=...)")))?;
                ("tau".to_string(), vec![tau])
            }
        };
        // every point must validate before any work starts
        for &v in &values {
            template.clone().with_param(&axis, v).validate()?;
        }

        let bound_names: Vec<String> = match &args.bounds {
            Some(b) => b.clone(),
            None => match from_file("bounds") {
                Some(b) => b.split(',').map(str::to_string).collect(),
                None => vec![if mode == Mode::Optimize { "opt_int" } else { "int" }.to_string()],
            },
        };
        let bounds = bound_names
            .iter()
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(BoundKind::parse)
            .collect::<Result<Vec<_>, _>>()?;
        if bounds.is_empty() {
            return Err(config_err("no bounds requested"));
        }

        let p_text = args.p.as_deref().or(from_file("p")).unwrap_or("1");
        let p = Exponent::new(parse_num::<f64>("p", p_text)?)?;
        let w_index = match args.w_index {
            Some(j) => j,
            None => from_file("w_index").map(|v| parse_num("w_index", v)).transpose()?.unwrap_or(1),
        };
        let basis_text = args.basis.as_deref().or(from_file("basis")).unwrap_or("canonical").to_string();
        let basis = BasisSelector::parse(&basis_text)?;

        let mut optimize = OptimizeConfig { seed, ..OptimizeConfig::default() };
        let budget = |flag: Option<usize>, key: &str, default: usize| -> Result<usize, Failure> {
            match flag {
                Some(v) => Ok(v),
                None => Ok(from_file(key).map(|v| parse_num(key, v)).transpose()?.unwrap_or(default)),
            }
        };
        optimize.basis_samples = budget(args.samples, "samples", optimize.basis_samples)?;
        optimize.hillclimb_iters = budget(args.iters, "iters", optimize.hillclimb_iters)?;
        optimize.hillclimb_starts = budget(args.starts, "starts", optimize.hillclimb_starts)?;
        optimize.validate()?;

        let format = match args.format {
            Some(f) => f,
            None => match from_file("format") {
                Some("csv") | None => Format::Csv,
                Some("jsonl") => Format::Jsonl,
                Some(other) => return Err(config_err(format!("unknown format `{other}`"))),
            },
        };
        let jobs = match args.jobs {
            Some(j) => Some(j),
            None => from_file("jobs").map(|v| parse_num("jobs", v)).transpose()?,
        };
        if jobs == Some(0) {
            return Err(config_err("--jobs must be at least 1"));
        }

        Ok(Request {
            template,
            axis,
            values,
            bounds,
            p,
            w_index,
            basis,
            optimize,
            format,
            out: args.out.clone(),
            timing: !args.no_timing,
            jobs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_grids() {
        assert_eq!(parse_values("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_values("0.5, 2").unwrap(), vec![0.5, 2.0]);
        assert_eq!(parse_values("4:9:1").unwrap(), vec![4.0]);
        assert!(parse_values("0:1:0").is_err());
        assert!(parse_values("1:2").is_err());
        assert!(parse_values("nan").is_err());
        assert!(parse_values("").is_err());
    }

    #[test]
    fn matrix_text() {
        let rows = parse_matrix("# hadamard\n0.5,0 1\n1 -1,0.25\n").unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0][0], C::new(0.5, 0.0));
        assert_eq!(rows[1][1], C::new(-1.0, 0.25));
        assert!(parse_matrix("1 x").is_err());
        assert!(parse_matrix("\n# nothing\n").is_err());
    }

    #[test]
    fn selectors() {
        assert_eq!(BasisSelector::parse("haar:12").unwrap(), BasisSelector::Haar(12));
        assert_eq!(BasisSelector::parse("energy").unwrap(), BasisSelector::Energy);
        assert!(BasisSelector::parse("haar:x").is_err());
        assert!(BasisSelector::parse("file:/nonexistent/basis.txt").is_err());
        assert!(BasisSelector::parse("diagonal").is_err());
        assert!(BoundKind::parse("opt").is_err());
    }
}
