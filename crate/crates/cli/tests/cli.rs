use std::f64::consts::PI;
use std::process::{Command, Output};

fn qsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Rows of a CSV output as column-name lookups.
fn rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| headers.iter().zip(rec.unwrap().iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        .collect()
}

fn num(row: &std::collections::HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap()
}

#[test]
fn single_run_in_delta_basis_is_tight() {
    let o = qsl(&["run", "--scenario", "qubit_ti", "--tau", "1.5", "--bounds", "int,sup,mt", "--basis", "delta_diag"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert!((num(&rows[0], "value") - 1.5).abs() < 1e-9);
    assert!((num(&rows[1], "value") - 2.0 * (0.75f64).sin()).abs() < 1e-9);
    assert!((num(&rows[2], "value") - 1.5).abs() < 1e-9);
    assert_eq!(rows[0]["basis"], "delta_diag");
    assert_eq!(rows[2]["p"], "");
    assert_eq!(rows[0]["seed"], "0");
    assert!(!rows[0]["wall_time"].is_empty());
}

#[test]
fn emission_sweep_has_one_record_per_point_and_bound() {
    let o = qsl(&[
        "sweep", "--scenario", "spont_emission", "--param", "tau=1", "--axis", "gamma", "--values", "0.05:5.0:200", "--bounds",
        "sup,int,mt,dl", "--no-timing",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 800);
    let mut last = f64::NEG_INFINITY;
    for chunk in rows.chunks(4) {
        let gamma = num(&chunk[0], "axis_value");
        assert!(gamma > last);
        last = gamma;
        let exact = (1.0 - (-gamma).exp()) / gamma;
        assert!((num(&chunk[0], "value") - exact).abs() <= 1e-9 * exact.max(1.0));
        assert!((num(&chunk[1], "value") - 1.0).abs() <= 1e-9);
        for row in chunk {
            assert!(num(row, "value") <= 1.0 + 1e-6, "{row:?}");
        }
    }
}

#[test]
fn output_is_byte_identical_across_worker_counts() {
    let args = |jobs: &'static str| {
        qsl(&[
            "sweep", "--scenario", "qudit4", "--axis", "tau", "--values", "0.5,1.0,2.0", "--bounds", "int,opt_int", "--samples",
            "8", "--iters", "40", "--seed", "3", "--jobs", jobs, "--no-timing",
        ])
    };
    let (a, b) = (args("1"), args("3"));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(rows(&stdout(&a)).iter().all(|r| r["seed"] == "3"));
}

#[test]
fn optimized_qubit_beyond_pi() {
    let tau = format!("{}", 4.0 * PI / 3.0);
    let o = qsl(&["optimize", "--scenario", "qubit_ti", "--tau", &tau, "--format", "jsonl"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 1);
    let v = lines[0]["value"].as_f64().unwrap();
    assert!((v - 3.20).abs() <= 0.05, "{v}");
    assert!(lines[0]["optimum"]["evaluations"].as_u64().unwrap() > 0);
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let basis = dir.path().join("hadamard.txt");
    let out = dir.path().join("out.csv");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    std::fs::write(&basis, format!("{h} {h}\n{h} -{h}\n")).unwrap();
    std::fs::write(
        &cfg,
        format!("# emission at gamma = 2\nscenario = spont_emission\ntau = 1\ngamma = 2\nbounds = int,sup\nbasis = file:{}\n", basis.display()),
    )
    .unwrap();
    let o = qsl(&["run", "--config", cfg.to_str().unwrap(), "--p", "2", "--w-index", "4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let rows = rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["axis"], "tau");
    assert_eq!(rows[0]["p"], "2");
    assert_eq!(rows[0]["w_index"], "4");
    assert!(rows[0]["basis"].starts_with("file:"));
    assert!(num(&rows[1], "value") <= num(&rows[0], "value") + 1e-12);
}

#[test]
fn configuration_errors_exit_with_two() {
    let cases: [&[&str]; 8] = [
        &["run", "--scenario", "qubit_ti", "--tau", "1", "--bounds", ""],
        &["run", "--scenario", "qubit", "--tau", "1"],
        &["run", "--scenario", "qubit_ti"],
        &["run", "--scenario", "qubit_ti", "--tau", "1", "--param", "gamma=1"],
        &["run", "--scenario", "qubit_ti", "--tau", "1", "--p", "0.5"],
        &["run", "--scenario", "qubit_ti", "--tau", "1", "--w-index", "5"],
        &["sweep", "--scenario", "spont_emission", "--tau", "1", "--axis", "hbar", "--values", "1,2"],
        &["run", "--scenario", "qubit_ti", "--tau", "1", "--bounds", "tq"],
    ];
    for args in cases {
        let o = qsl(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(String::from_utf8_lossy(&o.stderr).lines().count(), 1, "{args:?}");
    }
}

#[test]
fn unresolved_quadrature_exits_with_three() {
    let o = qsl(&["run", "--scenario", "qudit4", "--tau", "30", "--grid-points", "64", "--basis", "haar:5"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn special_bounds_on_their_scenarios() {
    let o = qsl(&["run", "--scenario", "dephasing", "--tau", "0.3", "--bounds", "tq,int", "--format", "jsonl"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["bound"], "tq");
    assert!(lines[0]["value"].as_f64().unwrap() > 0.0);
    let o = qsl(&["run", "--scenario", "coherence_gen", "--tau", "0.3", "--bounds", "tc"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn selftest_passes_and_fails_on_corruption() {
    let o = qsl(&["selftest"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}");
    assert!(text.lines().any(|l| l.starts_with("PASS randomized validity")), "{text}");
    let o = qsl(&["selftest", "--systems", "3", "--corrupt-tolerance", "-1"]);
    assert!(!o.status.success());
    assert!(stdout(&o).lines().filter(|l| l.starts_with("FAIL")).count() > 0);
}
