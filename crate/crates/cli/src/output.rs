use std::io::Write;

use serde::Serialize;

use crate::{Failure, Format};

/// CSV columns, in order.
pub const COLUMNS: [&str; 13] = [
    "scenario",
    "axis",
    "axis_value",
    "bound",
    "value",
    "p",
    "w_index",
    "basis",
    "numerator",
    "denominator",
    "degenerate",
    "wall_time",
    "seed",
];

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub scenario: String,
    pub axis: String,
    pub axis_value: f64,
    pub bound: String,
    pub value: f64,
    pub p: Option<String>,
    pub w_index: Option<usize>,
    pub basis: Option<String>,
    pub numerator: Option<f64>,
    pub denominator: Option<f64>,
    pub degenerate: Option<bool>,
    pub wall_time: Option<f64>,
    pub seed: u64,
}

/// Extra fields of an optimizer result, emitted in JSON lines only.
#[derive(Debug, Clone, Serialize)]
pub struct OptimumExtra {
    pub degenerate_optima_count: usize,
    pub evaluations: usize,
    pub history: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Line {
    #[serde(flatten)]
    pub record: Record,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimum: Option<OptimumExtra>,
}

/// Rounds to 12 significant digits; printing the result gives its shortest round-trip form.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

impl Record {
    pub fn rounded(mut self) -> Self {
        self.axis_value = sig12(self.axis_value);
        self.value = sig12(self.value);
        self.numerator = self.numerator.map(sig12);
        self.denominator = self.denominator.map(sig12);
        self.wall_time = self.wall_time.map(sig12);
        self
    }
}

pub fn write_lines(lines: &[Line], format: Format, out: impl Write) -> Result<(), Failure> {
    let io = |e: csv::Error| Failure::Io(e.to_string());
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(COLUMNS).map_err(io)?;
            for line in lines {
                w.serialize(&line.record).map_err(io)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut out = std::io::BufWriter::new(out);
            for line in lines {
                serde_json::to_writer(&mut out, line).map_err(|e| Failure::Io(e.to_string()))?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> Record {
        Record {
            scenario: "qubit_ti".into(),
            axis: "tau".into(),
            axis_value: 0.1 + 0.2,
            bound: "int".into(),
            value: 2.0 / 3.0,
            p: Some("1".into()),
            w_index: Some(1),
            basis: Some("file:a,b.txt".into()),
            numerator: Some(1.0),
            denominator: None,
            degenerate: Some(false),
            wall_time: None,
            seed: 0,
        }
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(2.0 / 3.0).to_string(), "0.666666666667");
        assert_eq!(sig12(0.1 + 0.2).to_string(), "0.3");
        assert_eq!(sig12(-1234567.891234567).to_string(), "-1234567.89123");
        assert_eq!(sig12(0.0), 0.0);
    }

    #[test]
    fn csv_quotes_and_leaves_missing_fields_empty() {
        let mut buf = Vec::new();
        let line = Line {
            record: record().rounded(),
            optimum: None,
        };
        write_lines(&[line], Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut rows = text.lines();
        assert_eq!(rows.next().unwrap(), COLUMNS.join(","));
        assert_eq!(
            rows.next().unwrap(),
            "qubit_ti,tau,0.3,int,0.666666666667,1,1,\"file:a,b.txt\",1.0,,false,,0"
        );
    }

    #[test]
    fn jsonl_carries_optimizer_extras() {
        let mut buf = Vec::new();
        let line = Line {
            record: record(),
            optimum: Some(OptimumExtra {
                degenerate_optima_count: 2,
                evaluations: 10,
                history: vec![(0, 1.5)],
            }),
        };
        write_lines(&[line], Format::Jsonl, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["optimum"]["degenerate_optima_count"], 2);
        assert_eq!(v["bound"], "int");
        assert!(v["denominator"].is_null());
    }
}
