use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_renyirate"));
    c.env_remove("RENYIRATE_WORKERS");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn records(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectral_row_for_markov_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["renyi", data("markov2.txt").to_str().unwrap(), "--alpha", "2", "--spectral", "--out", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = records(&dir.path().join("rates.csv"));
    assert_eq!(header, ["alpha", "n_or_spectral", "value"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], "spectral");
    // λ = 0.75² + 0.25² for the symmetric chain.
    let expect = -(0.625f64).log2();
    assert!((rows[0][2].parse::<f64>().unwrap() - expect).abs() < 1e-12);
    let echoed = std::fs::read_to_string(dir.path().join("model.txt")).unwrap();
    assert!(echoed.starts_with("alphabet 2\nkind markov\norder 1\n"));
}

#[test]
fn enumeration_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "renyi",
        data("hmm_flip05.txt").to_str().unwrap(),
        "--alpha",
        "2",
        "--enumerate",
        "--n-max",
        "10",
        "--out",
        out,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (_, rows) = records(&dir.path().join("rates.csv"));
    assert_eq!(rows.len(), 10);
    let ns: Vec<String> = rows.iter().map(|r| r[1].clone()).collect();
    assert_eq!(ns, (1..=10).map(|n| n.to_string()).collect::<Vec<_>>());
    let vals: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn alpha_list_fans_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "renyi",
        data("iid3.txt").to_str().unwrap(),
        "--alpha",
        "0.5,2,1",
        "--spectral",
        "--enumerate",
        "--n-max",
        "3",
        "--out",
        out,
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (_, rows) = records(&dir.path().join("rates.csv"));
    assert_eq!(rows.len(), 12);
    for alpha in ["0.5", "2", "1"] {
        let vals: Vec<f64> = rows.iter().filter(|r| r[0] == alpha).map(|r| r[2].parse().unwrap()).collect();
        assert!(vals.iter().all(|v| (v - vals[0]).abs() < 1e-12), "iid rates are constant in n");
    }
}

#[test]
fn bad_row_sum_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["renyi", data("bad_row.txt").to_str().unwrap(), "--spectral", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("row 2"), "{}", stderr(&o));
}

#[test]
fn hidden_model_has_no_spectral_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["renyi", data("hmm_flip05.txt").to_str().unwrap(), "--spectral", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn missing_file_and_bad_flags_are_input_errors() {
    assert_eq!(code(&run(&["renyi", "/nonexistent/model.txt", "--spectral"])), 2);
    assert_eq!(code(&run(&["renyi"])), 2);
    assert_eq!(code(&run(&["counterexample", "--policy", "sometimes"])), 2);
    assert_eq!(code(&run(&["counterexample", "--alpha", "0.5"])), 2);
    let o = bin().env("RENYIRATE_WORKERS", "zero").args(["counterexample", "--levels", "1"]).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn approx_on_iid_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["approx", data("iid3.txt").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = records(&dir.path().join("approx.csv"));
    assert_eq!(header, ["m", "value", "diff"]);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0][2], "");
    assert!(rows[1..].iter().all(|r| r[2].parse::<f64>().unwrap() == 0.0));
    let fit = json(&dir.path().join("fit.json"));
    assert!(fit["rho_hat"].is_null());
    assert!(fit["residual"].is_number());
}

#[test]
fn approx_on_flip_hmm_fits_a_rate() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "approx",
        data("hmm_flip05.txt").to_str().unwrap(),
        "--m-max",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rho = json(&dir.path().join("fit.json"))["rho_hat"].as_f64().unwrap();
    assert!(rho > 0.0 && rho < 1.0, "{rho}");
}

#[test]
fn approx_past_the_cap_is_numeric() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "approx",
        data("hmm_flip05.txt").to_str().unwrap(),
        "--m-max",
        "30",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("cap"), "{}", stderr(&o));
}

#[test]
fn toy_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["counterexample", "--mode", "toy", "--levels", "3", "--alpha", "2,4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (header, rows) = records(&dir.path().join("levels.csv"));
    assert_eq!(rows.len(), 3);
    assert_eq!(
        header,
        [
            "m",
            "l_m",
            "beta_m",
            "alpha_m",
            "entropy_lower_bound",
            "renyi_upper_bound_alpha_2",
            "renyi_upper_bound_alpha_4"
        ]
    );
    assert_eq!(rows.iter().map(|r| r[1].as_str()).collect::<Vec<_>>(), ["6", "12", "24"]);
    let v = json(&dir.path().join("verdict.json"));
    assert_eq!(v["property_B"], true);
    for key in ["property_A", "property_B", "property_D_bound", "renyi_gap"] {
        assert!(!v[key].is_null(), "{key}");
    }
}

#[test]
fn faithful_counterexample_fifty_levels() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["counterexample", "--mode", "faithful", "--levels", "50", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (_, rows) = records(&dir.path().join("levels.csv"));
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r[4].parse::<f64>().unwrap() > 0.5));
    let v = json(&dir.path().join("verdict.json"));
    assert_eq!(v["l1"], 21);
    assert_eq!(v["N"], 127);
    assert_eq!(v["property_D_holds"], true);
    assert!(v["renyi_gap"].as_f64().unwrap() > 0.0);
}

#[test]
fn strict_policy_on_toy_certifies_every_fold() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "counterexample",
        "--levels",
        "2",
        "--policy",
        "strict",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&dir.path().join("verdict.json"));
    assert_eq!(v["epsilon_certified"], true);
}

#[test]
fn cutstack_operations() {
    let dir = tempfile::tempdir().unwrap();
    let l = data("left.gadget");
    let r = data("right.gadget");
    let q = data("quarter.gadget");
    let ics = dir.path().join("ics.gadget");
    let o = run(&["cutstack", "ics", l.to_str().unwrap(), r.to_str().unwrap(), "-o", ics.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&ics).unwrap().lines().count(), 4);

    let o = run(&["cutstack", "merge", ics.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 2);

    let o = run(&["cutstack", "entropy", ics.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let h: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // labels 01 and 11 with measure 1/2 each, height 2
    assert!((h["entropy"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    let o = run(&["cutstack", "entropy", q.to_str().unwrap()]);
    let h: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((h["entropy"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let o = run(&["cutstack", "eps-indep", l.to_str().unwrap(), r.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let e: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // disjoint supports: every term is λ(C)λ(D)
    assert_eq!(e["epsilon_exact"], "1/4");

    let o = run(&["cutstack", "mfold", l.to_str().unwrap(), "-m", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 8);

    // measure 1/2 has no normalized entropy
    assert_eq!(code(&run(&["cutstack", "entropy", l.to_str().unwrap()])), 2);
    // overlapping supports
    assert_eq!(code(&run(&["cutstack", "ics", l.to_str().unwrap(), l.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["cutstack", "ics", l.to_str().unwrap(), q.to_str().unwrap()])), 2);
}

#[test]
fn sample_depends_only_on_seed() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let d3 = tempfile::tempdir().unwrap();
    let m = data("markov2.txt");
    for (d, seed) in [(&d1, "7"), (&d2, "7"), (&d3, "8")] {
        let o = run(&["sample", m.to_str().unwrap(), "-n", "200", "--seed", seed, "--out", d.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("sample.txt")).unwrap();
    assert_eq!(read(&d1), read(&d2));
    assert_ne!(read(&d1), read(&d3));
}

#[test]
fn worker_count_does_not_change_output() {
    let m = data("hmm_flip05.txt");
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let d = tempfile::tempdir().unwrap();
        let o = bin()
            .env("RENYIRATE_WORKERS", workers)
            .args(["renyi", m.to_str().unwrap(), "--enumerate", "--n-max", "12", "--alpha", "0.5,2"])
            .args(["--out", d.path().to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outputs.push(std::fs::read(d.path().join("rates.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
