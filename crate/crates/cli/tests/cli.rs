use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pharmonic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn exponent_text_for_the_poisson_case() {
    let o = run(&["exponent", "--p", "2", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("alpha = 2.0000000000"), "{}", stdout(&o));
}

#[test]
fn exponent_json_for_the_planar_case() {
    let o = run(&["exponent", "--p", "3", "--n", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let alpha = v["alpha"].as_f64().unwrap();
    assert!((alpha - 0.5773503).abs() < 1e-7, "{alpha}");
    for key in ["p", "n", "k_star", "bracket_lo", "bracket_hi", "iterations", "tol", "residual_max"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn exponent_csv_round_trips() {
    let o = run(&["exponent", "--p", "2", "--n", "4", "--format", "csv"]);
    let rows = csv_rows(&stdout(&o));
    let alpha: f64 = rows[0][3].parse().unwrap();
    assert!((alpha - 3.0).abs() < 1e-7);
}

#[test]
fn exit_codes() {
    let o = run(&["exponent", "--p", "0.5", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("p must exceed 1"), "{}", stderr(&o));

    assert_eq!(run(&["exponent", "--p", "2", "--n", "1"]).status.code(), Some(1));
    assert_eq!(run(&["exponent", "--p", "2", "--n", "3", "--tol", "1e-2"]).status.code(), Some(1));
    assert_eq!(run(&["exponent", "--p", "two", "--n", "3"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    // close to p = 1 the profile degenerates before the bracket is found
    let o = run(&["exponent", "--p", "1.000001", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn classify_examples() {
    for (args, verdict) in [
        (["--p", "2", "--n", "3", "--k", "-2"], "Harmonic"),
        (["--p", "3", "--n", "4", "--k", "-5"], "Subharmonic"),
        (["--p", "5", "--n", "3", "--k", "-0.5"], "Superharmonic"),
    ] {
        let o = run(&[&["classify"][..], &args[..]].concat());
        assert_eq!(o.status.code(), Some(0));
        let out = stdout(&o);
        assert!(out.contains(&format!("verdict = {verdict}\n")), "{out}");
        assert!(out.contains("alpha_coeff = ") && out.contains("beta_coeff = "));
    }
}

#[test]
fn table_rows_and_determinism() {
    let o = run(&["table", "--p-min", "2", "--p-max", "2", "--p-step", "0.5", "--n", "4,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("p,N,alpha,lower_bound,upper_bound,in_bounds,error\n"));
    assert!(!out.contains("table:"), "progress leaked into the CSV");
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 3);
    for (row, n) in rows.iter().zip(2..) {
        assert_eq!(row[1], n.to_string());
        let alpha: f64 = row[2].parse().unwrap();
        assert!((alpha - (n as f64 - 1.0)).abs() < 1e-7, "{row:?}");
        assert_eq!(row[5], "true");
        assert_eq!(row[6], "");
    }

    let o = run(&["table", "--p-min", "4", "--p-max", "4", "--p-step", "1", "--n", "4"]);
    let rows = csv_rows(&stdout(&o));
    assert!((rows[0][2].parse::<f64>().unwrap() - 1.0).abs() < 1e-7);

    let dir = tempfile::tempdir().unwrap();
    let args = |path: &str| {
        vec!["table", "--p-min", "1.6", "--p-max", "2.2", "--p-step", "0.3", "--n", "2,3", "--out", path]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let owned = args(path.to_str().unwrap());
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        assert_eq!(run(&refs).status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let rows = csv_rows(&text);
    let order: Vec<(String, String)> = rows.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    let ps = ["1.6000000000000001e0", "1.8999999999999999e0", "2.2000000000000002e0"];
    let expect: Vec<(String, String)> =
        ps.iter().flat_map(|p| ["2", "3"].map(|n| (p.to_string(), n.to_string()))).collect();
    assert_eq!(order, expect);
    assert!(rows.iter().all(|r| r[5] == "true"), "{text}");
}

#[test]
fn table_validation() {
    assert_eq!(run(&["table", "--p-min", "0.9", "--p-max", "2", "--p-step", "0.5", "--n", "2"]).status.code(), Some(1));
    assert_eq!(run(&["table", "--p-min", "2", "--p-max", "3", "--p-step", "0", "--n", "2"]).status.code(), Some(1));
    assert_eq!(run(&["table", "--p-min", "3", "--p-max", "2", "--p-step", "0.5", "--n", "2"]).status.code(), Some(1));
}

#[test]
fn profile_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let o = run(&["profile", "--p", "2", "--n", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,f,fprime,H"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 1.0, 0.0, 0.0]);
    assert_eq!(text.lines().count(), 1005);

    let o = run(&["profile", "--p", "2", "--n", "3", "--points", "8"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_suite() {
    let o = run(&["verify", "--p", "2", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().last() == Some("PASS"));

    let o = run(&["verify", "--p", "2.5", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("in [1.2500000000, 1.3333333333]"), "{}", stdout(&o));

    let o = run(&["verify", "--p", "1.5", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn measure2d_validation() {
    assert_eq!(run(&["measure2d", "--p", "2", "--deltas", "0.05,abc,0.2"]).status.code(), Some(1));
    assert_eq!(run(&["measure2d", "--p", "2", "--deltas", "0.05,0.1"]).status.code(), Some(1));
    assert_eq!(run(&["measure2d", "--p", "2", "--deltas", "0.1,0.2,0.3,0.9"]).status.code(), Some(1));
    assert_eq!(run(&["measure2d", "--p", "1", "--deltas", "0.05,0.1,0.2,0.4"]).status.code(), Some(1));
    assert_eq!(
        run(&["measure2d", "--p", "2", "--deltas", "0.05,0.1,0.2,0.4", "--grid", "100"]).status.code(),
        Some(1)
    );
}

#[test]
fn measure2d_poisson_case() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("measure.csv");
    let o = run(&["measure2d", "--p", "2", "--deltas", "0.05,0.1,0.2,0.4", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("alpha_hat = "), "{}", stdout(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("p,delta,omega,alpha_hat,r2\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4);
    let alpha_hat: f64 = rows[0][3].parse().unwrap();
    assert!((alpha_hat - 1.0).abs() < 0.1, "{alpha_hat}");
    let omegas: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(omegas.windows(2).all(|w| w[1] > w[0]));
}
