use std::path::PathBuf;
use std::process::{Command, Output};

fn model(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name).display().to_string()
}

fn renewal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renewal")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn roots_of_uniform() {
    let o = renewal(&["roots", "--model", &model("uniform01.json"), "--r0", "2.5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let roots = v.as_array().unwrap();
    assert_eq!(roots.len(), 3);
    for key in ["re", "im", "multiplicity", "g_prime_re", "g_prime_im"] {
        assert!(roots[1].get(key).is_some(), "missing {key}");
    }
    assert!((roots[1]["re"].as_f64().unwrap() - 2.088843015613043).abs() < 1e-10);
}

#[test]
fn erlang_density_column() {
    let o = renewal(&["expand", "density", "--model", &model("erlang22.json"), "--r0", "5", "--x", "0:5:0.1"]);
    assert!(o.status.success());
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header[..3], ["x", "value", "linear_part"]);
    assert_eq!(header.last().unwrap(), "remainder_bound");
    assert!(header[3].starts_with("term_"));
    assert_eq!(rows.len(), 51);
    for r in rows {
        assert!((r[1] - (1.0 - (-4.0 * r[0]).exp())).abs() < 1e-8);
        assert!((r.last().unwrap() - (-5.0 * r[0]).exp()).abs() < 1e-15);
    }
}

#[test]
fn mass_and_u_expansions() {
    let o = renewal(&["expand", "mass", "--model", &model("nb_p04_n2.json"), "--r0", "3", "--x", "0,1,2"]);
    assert!(o.status.success());
    let (_, rows) = csv(&stdout(&o));
    assert!((rows[0][1] - 1.5625).abs() < 1e-12);
    let o = renewal(&["expand", "U", "--model", &model("uniform01.json"), "--r0", "2.5", "--x", "0.5"]);
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header.len(), 5);
    assert!((rows[0][1] - 0.5f64.exp()).abs() < 0.05);
}

#[test]
fn lattice_points_must_be_integers() {
    let o = renewal(&["expand", "mass", "--model", &model("nb_p04_n2.json"), "--r0", "3", "--x", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--x"));
}

#[test]
fn usage_errors_exit_one() {
    let o = renewal(&["roots", "--r0", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--model"));
    let o = renewal(&["expand", "v", "--model", &model("uniform01.json"), "--r0", "2", "--x", "3,1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = renewal(&["roots", "--model", "/nonexistent.json", "--r0", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent.json"));
    let o = renewal(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("validate"));
}

#[test]
fn ruin_subcommands() {
    let o = renewal(&[
        "ruin", "continuous", "--claims", &model("erlang22.json"), "--alpha", "1", "--premium", "1.5", "--r", "6",
        "--x", "0:4:1",
    ]);
    assert!(o.status.success());
    let (header, rows) = csv(&stdout(&o));
    assert_eq!(header[..2], ["x", "value"]);
    assert!((rows[0][1] - 1.0 / 1.5).abs() < 1e-10);

    let o = renewal(&["ruin", "discrete", "--claims", &model("two_point.json"), "--r", "3", "--x", "1:5:1"]);
    assert!(o.status.success());
    let (_, rows) = csv(&stdout(&o));
    for r in rows {
        assert!((r[1] - (3.0f64 / 7.0).powf(r[0])).abs() < 1e-12);
    }

    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let o = renewal(&[
        "ruin", "bivariate", "--m1", &model("insurer.json"), "--m2", &model("reinsurer.json"), "--q", "0.5",
        "--x", "0:4:1", "--curve", curve.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["region", "d0", "D0", "d1", "D1"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["region"], "second_then_first");
    let (header, rows) = csv(&std::fs::read_to_string(curve).unwrap());
    assert_eq!(header, ["x", "psi_or"]);
    assert_eq!(rows.len(), 5);
}

#[test]
fn validate_is_reproducible_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_renewal"))
            .args(["validate", "--suite", "lattice", "--seed", "7", "--n-paths", "20000", "--json"])
            .env("RENEWAL_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("4");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn validate_all_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = renewal(&["validate", "--suite", "all", "--seed", "42", "--report", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["seed"], 42);
}
