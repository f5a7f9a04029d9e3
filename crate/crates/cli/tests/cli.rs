use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qleb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qleb"))
        .args(args)
        .env_remove("QLEB_CUTOFF")
        .output()
        .expect("qleb runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Writes a real 2x2 matrix in the wire format.
fn matrix(dir: &TempDir, name: &str, entries: [[f64; 2]; 4]) -> PathBuf {
    let path = dir.path().join(name);
    let v = serde_json::json!({ "dim": 2, "entries": entries });
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn diag(a: f64, b: f64) -> [[f64; 2]; 4] {
    [[a, 0.0], [0.0, 0.0], [0.0, 0.0], [b, 0.0]]
}

/// `|psi><psi|` for the real unit vector `(cos t, sin t)`.
fn pure(t: f64) -> [[f64; 2]; 4] {
    let (c, s) = (t.cos(), t.sin());
    [[c * c, 0.0], [c * s, 0.0], [c * s, 0.0], [s * s, 0.0]]
}

fn parse(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn entries(m: &Value) -> Vec<f64> {
    m["entries"].as_array().unwrap().iter().flat_map(|z| z.as_array().unwrap().iter().map(|x| x.as_f64().unwrap())).collect()
}

#[test]
fn decompose_pure_against_projector_has_no_singular_part() {
    let dir = TempDir::new().unwrap();
    let rho = matrix(&dir, "rho.json", diag(1.0, 0.0));
    let sigma = matrix(&dir, "sigma.json", pure(std::f64::consts::FRAC_PI_4));
    let out = qleb(&["decompose", "--rho", s(&rho), "--sigma", s(&sigma)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = parse(&stdout(&out));
    for route in ["block", "direct"] {
        assert!(entries(&report[route]["sigma_sing"]).iter().all(|x| x.abs() <= 1e-12), "{route}");
        let ac = entries(&report[route]["sigma_ac"]);
        assert!(ac.iter().step_by(2).all(|x| (x - 0.5).abs() <= 1e-12), "{route}: {ac:?}");
    }
    assert_eq!(report["block"]["route"], "block");
    assert_eq!(report["direct"]["route"], "direct");
    assert!(report["disagreement"]["max"].as_f64().unwrap() <= 1e-8);
    assert_eq!(report["routes_agree"], true);
    assert_eq!(report["version"], qleb::VERSION);
    assert_eq!(report["config"]["command"], "decompose");
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let good = matrix(&dir, "good.json", diag(1.0, 0.0));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dim\": 2, \"entries\": [[1, 0], [0").unwrap();
    assert_eq!(code(&qleb(&["decompose", "--rho", s(&bad), "--sigma", s(&good)])), 2);
    assert_eq!(code(&qleb(&["check", "ac", "--rho", s(&good), "--sigma", s(&bad)])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&qleb(&["decompose", "--rho", s(&missing), "--sigma", s(&good)])), 2);
    // Wrong entry count, non-Hermitian, indefinite.
    std::fs::write(&bad, "{\"dim\": 2, \"entries\": [[1, 0]]}").unwrap();
    assert_eq!(code(&qleb(&["decompose", "--rho", s(&bad), "--sigma", s(&good)])), 2);
    let skew = matrix(&dir, "skew.json", [[1.0, 0.0], [0.5, 0.0], [0.0, 0.0], [1.0, 0.0]]);
    assert_eq!(code(&qleb(&["decompose", "--rho", s(&skew), "--sigma", s(&good)])), 2);
    let indefinite = matrix(&dir, "neg.json", diag(1.0, -0.5));
    assert_eq!(code(&qleb(&["decompose", "--rho", s(&indefinite), "--sigma", s(&good)])), 2);
    // 2x2 against 3x3.
    let big = dir.path().join("big.json");
    std::fs::write(&big, serde_json::json!({"dim": 3, "entries": vec![[0.0, 0.0]; 9]}).to_string()).unwrap();
    assert_eq!(code(&qleb(&["decompose", "--rho", s(&good), "--sigma", s(&big)])), 2);
}

#[test]
fn route_disagreement_beyond_tolerance_exits_3() {
    let dir = TempDir::new().unwrap();
    let (rho, sigma) = (dir.path().join("rho.json"), dir.path().join("sigma.json"));
    let sampled = qleb(&[
        "sample", "--dim", "4", "--rank-rho", "2", "--rank-sigma", "3", "--seed", "3",
        "--rho", s(&rho), "--sigma", s(&sigma),
    ]);
    assert_eq!(code(&sampled), 0);
    // Corrupt sigma with a large anti-Hermitian part and admit it with a lax tolerance.
    let mut m = parse(&std::fs::read_to_string(&sigma).unwrap());
    let e = m["entries"].as_array_mut().unwrap();
    for k in [1, 4] {
        e[k][1] = (e[k][1].as_f64().unwrap() + 0.05).into();
    }
    std::fs::write(&sigma, m.to_string()).unwrap();
    let strict = qleb(&["decompose", "--rho", s(&rho), "--sigma", s(&sigma)]);
    assert_eq!(code(&strict), 2);
    let lax = ["decompose", "--rho", s(&rho), "--sigma", s(&sigma), "--hermitian-tol", "0.2"];
    let ok = qleb(&lax);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let gap = parse(&stdout(&ok))["disagreement"]["max"].as_f64().unwrap();
    assert!(gap > 0.0 && gap <= 1e-8, "{gap}");
    let tight = qleb(&[&lax[..], &["--route-tol", "1e-300"]].concat());
    assert_eq!(code(&tight), 3);
    assert_eq!(parse(&stdout(&tight))["routes_agree"], false);
    assert_eq!(code(&qleb(&[&lax[..], &["--route-tol", "0"]].concat())), 2);
}

#[test]
fn singular_on_orthogonal_pures() {
    let dir = TempDir::new().unwrap();
    let rho = matrix(&dir, "rho.json", pure(0.3));
    let sigma = matrix(&dir, "sigma.json", pure(0.3 + std::f64::consts::FRAC_PI_2));
    let out = qleb(&["check", "singular", "--rho", s(&rho), "--sigma", s(&sigma)]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("singular: true\n"), "{text}");
    for criterion in ["excision vanishes: true", "supports orthogonal: true", "trace vanishes: true"] {
        assert!(text.contains(criterion), "{criterion} missing from\n{text}");
    }
}

#[test]
fn ac_on_orthogonal_diagonals_is_false() {
    let dir = TempDir::new().unwrap();
    let rho = matrix(&dir, "rho.json", diag(1.0, 0.0));
    let sigma = matrix(&dir, "sigma.json", diag(0.0, 1.0));
    let out = qleb(&["check", "ac", "--rho", s(&rho), "--sigma", s(&sigma)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("absolutely continuous (rho << sigma): false"));
    // The other way round against a full-rank sigma holds, with a witness.
    let full = matrix(&dir, "full.json", diag(0.25, 0.75));
    let report = dir.path().join("ac.json");
    let out = qleb(&["check", "ac", "--rho", s(&rho), "--sigma", s(&full), "--out", s(&report)]);
    assert_eq!(code(&out), 0);
    let v = parse(&std::fs::read_to_string(&report).unwrap());
    assert_eq!(v["verdict"], true);
    // R = diag(2, 0): R sigma R = diag(1, 0).
    let w = entries(&v["diagnostics"]["witness"]);
    assert!((w[0] - 2.0).abs() <= 1e-12 && w[6].abs() <= 1e-12, "{w:?}");
}

#[test]
fn mutual_on_overlapping_pures() {
    let dir = TempDir::new().unwrap();
    // |<psi|phi>| = cos t = 0.7.
    let rho = matrix(&dir, "rho.json", pure(0.0));
    let sigma = matrix(&dir, "sigma.json", pure(0.7f64.acos()));
    let out = qleb(&["check", "mutual", "--rho", s(&rho), "--sigma", s(&sigma)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("rank criterion: true"));
    let mixed = matrix(&dir, "mixed.json", diag(0.5, 0.5));
    assert_eq!(code(&qleb(&["check", "mutual", "--rho", s(&rho), "--sigma", s(&mixed)])), 1);
}

#[test]
fn qclt_on_the_pure_spin_model() {
    let out = qleb(&["qlan", "--model", "spin-pure", "--study", "qclt", "--n", "100,1000,10000", "--xi", "1,0"]);
    assert_eq!(code(&out), 0);
    let v = parse(&stdout(&out));
    let report = &v["reports"][0];
    assert_eq!(report["study"], "qclt");
    assert_eq!(report["verdict"], "pass");
    let errors: Vec<f64> = report["errors"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (e, expected) in errors.iter().zip([5.0e-4, 5.0e-5, 5.0e-6]) {
        assert!((e / expected - 1.0).abs() <= 0.05, "{errors:?}");
    }
    assert!((report["fitted_rate"].as_f64().unwrap() + 1.0).abs() <= 0.05);
    assert_eq!(v["config"]["model"], "spin-pure");
    assert_eq!(v["config"]["n_grid"], serde_json::json!([100, 1000, 10000]));
}

#[test]
fn oh2_on_the_quartic_model() {
    let out = qleb(&["qlan", "--model", "spin-perturbed:quartic", "--study", "oh2"]);
    assert_eq!(code(&out), 0);
    let report = &parse(&stdout(&out))["reports"][0];
    assert_eq!(report["study"], "oh2");
    assert!((report["fitted_slope"].as_f64().unwrap() - 2.0).abs() <= 0.1);
    // The quadratic perturbation is not o(|h|^2).
    let out = qleb(&["qlan", "--model", "spin-perturbed:quadratic", "--study", "oh2"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn lecam_on_the_quartic_model() {
    let out = qleb(&["qlan", "--model", "spin-perturbed:quartic", "--study", "lecam", "--h", "0.3,0.1", "--xi", "1,0", "--xi", "0,-1", "--xi", "0.5,0.5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = parse(&stdout(&out));
    let report = &v["reports"][0];
    assert_eq!(report["verdict"], "pass");
    let errors = report["errors"].as_array().unwrap();
    assert!(errors.last().unwrap().as_f64().unwrap() <= 1e-4);
    assert_eq!(v["config"]["queries"].as_array().unwrap().len(), 3);
}

#[test]
fn several_studies_in_one_run() {
    let out = qleb(&["qlan", "--model", "spin-perturbed:quartic", "--study", "qclt,sandwich", "--study", "lecam", "--h", "0.3,0.1", "--n", "100,1000"]);
    assert_eq!(code(&out), 0);
    let studies: Vec<String> = parse(&stdout(&out))["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["study"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(studies, ["qclt", "sandwich", "lecam"]);
}

#[test]
fn support_violation_exits_4() {
    let dir = TempDir::new().unwrap();
    // rho_0 = I/2; the grid point reached at n = 4 with h = 1 is pure, so rho_0 is not dominated.
    let mut points: Vec<Value> = [0.0, 1e-5, -1e-5, 5e-6, -5e-6]
        .iter()
        .map(|&t| {
            let a = 0.5 + 0.1 * t;
            serde_json::json!({"theta": [t], "state": {"dim": 2, "entries": diag(a, 1.0 - a)}})
        })
        .collect();
    points.push(serde_json::json!({"theta": [0.5], "state": {"dim": 2, "entries": diag(0.0, 1.0)}}));
    let table = serde_json::json!({"name": "edge", "dim": 2, "theta_dim": 1, "theta0": [0.0], "points": points});
    let path = dir.path().join("edge.json");
    std::fs::write(&path, table.to_string()).unwrap();
    let out = qleb(&["qlan", "--model-file", s(&path), "--study", "lecam", "--h", "1", "--n", "4,16"]);
    assert_eq!(code(&out), 4);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n = 4") && err.contains("[0.5]"), "{err}");
}

#[test]
fn qlan_input_errors_exit_2() {
    let bad: &[&[&str]] = &[
        &["qlan", "--model", "no-such-model", "--study", "qclt"],
        &["qlan", "--model", "spin-pure", "--study", "qclt", "--n", "100,10"],
        &["qlan", "--model", "spin-pure", "--study", "qclt", "--xi", "1,x"],
        &["qlan", "--model", "spin-pure", "--study", "qclt", "--xi", "1,0,0"],
        &["qlan", "--model", "spin-pure", "--study", "lecam", "--h", "0.3"],
        &["qlan", "--model", "spin-pure", "--study", "qclt", "--xi", "100,0", "--n", "1,2"],
        &["qlan", "--model", "spin-pure", "--study", "nonsense"],
        &["qlan", "--study", "qclt"],
    ];
    for args in bad {
        assert_eq!(code(&qleb(args)), 2, "{args:?}");
    }
}

#[test]
fn complex_and_json_queries() {
    let text = qleb(&["qlan", "--model", "spin-pure", "--study", "qclt", "--xi", "1:-0.5,0;0,1", "--xi", "[[[0.5,0],[0,0.25]]]", "--n", "100,1000"]);
    assert_eq!(code(&text), 0, "{}", String::from_utf8_lossy(&text.stderr));
    let queries = &parse(&stdout(&text))["config"]["queries"];
    assert_eq!(queries, &serde_json::json!([[[[1.0, -0.5], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]], [[[0.5, 0.0], [0.0, 0.25]]]]));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = qleb(&["qlan", "--model", "spin-perturbed:quartic", "--study", "lecam,oh2", "--h", "0.3,0.1", "--n", "100,1000", "--out", s(&path)]);
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
        std::fs::read(&path).unwrap()
    };
    let (a, b) = (run("a.json"), run("b.json"));
    // The out path is part of the config; everything else must match.
    let strip = |bytes: Vec<u8>, name: &str| String::from_utf8(bytes).unwrap().replace(name, "OUT");
    assert_eq!(strip(a, "a.json"), strip(b, "b.json"));

    let rho = matrix(&dir, "rho.json", diag(0.6, 0.4));
    let sigma = matrix(&dir, "sigma.json", pure(0.4));
    let args = ["decompose", "--rho", s(&rho), "--sigma", s(&sigma)];
    assert_eq!(qleb(&args).stdout, qleb(&args).stdout);
}

#[test]
fn csv_output() {
    let dir = TempDir::new().unwrap();
    let out = qleb(&["qlan", "--model", "spin-pure", "--study", "qclt", "--n", "100,1000", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# qclt");
    assert_eq!(lines[1], "n,error");
    assert!(lines[2].starts_with("100,5.06") && lines[3].starts_with("1000,5.05"), "{text}");

    let path = dir.path().join("report.csv");
    let out = qleb(&["qlan", "--model", "spin-perturbed:quartic", "--study", "qclt,oh2", "--format", "csv", "--out", s(&path)]);
    assert_eq!(code(&out), 0);
    let qclt = std::fs::read_to_string(dir.path().join("report.qclt.csv")).unwrap();
    let oh2 = std::fs::read_to_string(dir.path().join("report.oh2.csv")).unwrap();
    assert!(qclt.starts_with("n,error\n100,"));
    assert!(oh2.starts_with("radius,g_max\n2.0000000000000001e-1,"));
    assert_eq!(oh2.lines().count(), 5);

    let rho = matrix(&dir, "rho.json", diag(1.0, 0.0));
    assert_eq!(code(&qleb(&["decompose", "--rho", s(&rho), "--sigma", s(&rho), "--format", "csv"])), 2);
}

#[test]
fn cutoff_from_flag_and_environment() {
    let dir = TempDir::new().unwrap();
    let rho = matrix(&dir, "rho.json", diag(1.0, 0.0));
    let args = ["decompose", "--rho", s(&rho), "--sigma", s(&rho)];
    let cutoff = |out: Output| parse(&stdout(&out))["config"]["cutoff"].as_f64().unwrap();
    assert_eq!(cutoff(qleb(&args)), qleb::linalg::DEFAULT_CUTOFF);
    let run_env = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_qleb"))
            .args(args)
            .args(extra)
            .env("QLEB_CUTOFF", "1e-9")
            .output()
            .unwrap()
    };
    assert_eq!(cutoff(run_env(&[])), 1e-9);
    assert_eq!(cutoff(run_env(&["--cutoff", "1e-7"])), 1e-7);
    assert_eq!(code(&qleb(&[&args[..], &["--cutoff", "-1"]].concat())), 2);
}

#[test]
fn cutoff_decides_rank() {
    let dir = TempDir::new().unwrap();
    // diag(1, 1e-9): full rank at the default cutoff, rank one at 1e-6.
    let rho = matrix(&dir, "rho.json", diag(1.0, 1e-9));
    let sigma = matrix(&dir, "sigma.json", diag(0.0, 1.0));
    let ac = ["check", "ac", "--rho", s(&sigma), "--sigma", s(&rho)];
    assert_eq!(code(&qleb(&ac)), 0);
    assert_eq!(code(&qleb(&[&ac[..], &["--cutoff", "1e-6"]].concat())), 1);
}

#[test]
fn sample_is_seeded() {
    let dir = TempDir::new().unwrap();
    let write = |tag: &str, seed: &str, mode: &str| {
        let (r, s_) = (dir.path().join(format!("r{tag}.json")), dir.path().join(format!("s{tag}.json")));
        let out = qleb(&["sample", "--dim", "3", "--rank-rho", "1", "--rank-sigma", "2", "--seed", seed, "--mode", mode, "--rho", s(&r), "--sigma", s(&s_)]);
        assert_eq!(code(&out), 0);
        (std::fs::read(r).unwrap(), std::fs::read(s_).unwrap())
    };
    assert_eq!(write("a", "5", "generic"), write("b", "5", "generic"));
    assert_ne!(write("a", "5", "generic"), write("c", "6", "generic"));
    let (r, s_) = (dir.path().join("ro.json"), dir.path().join("so.json"));
    write("o", "1", "orthogonal");
    assert_eq!(code(&qleb(&["check", "singular", "--rho", s(&r), "--sigma", s(&s_)])), 0);
    assert_eq!(code(&qleb(&["sample", "--dim", "2", "--rank-rho", "3", "--rank-sigma", "1", "--rho", s(&r), "--sigma", s(&s_)])), 2);
}
