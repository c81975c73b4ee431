use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pwls::generators::canonical;
use serde_json::Value;

fn pwls(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwls"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_vector(path: &Path, v: &[f64]) {
    let text: String = v.iter().map(|x| format!("{x:?}\n")).collect();
    fs::write(path, text).unwrap();
}

#[test]
fn canonical_cycle_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = pwls(&["generate", "--canonical", "spd_3cycle", "--out", "c"], d);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    write_vector(&d.join("x0.txt"), &canonical("spd_3cycle").unwrap().cycles[0][0]);

    let out = pwls(&["solve", "--manifest", "c/manifest.json", "--x0", "x0.txt"], d);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["status"]["kind"], "cycle_detected");
    assert_eq!(report["status"]["length"], 3);
    assert_eq!(report["cycle_points"].as_array().unwrap().len(), 3);
}

#[test]
fn generated_dominant_problem_solves_with_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = pwls(
        &["generate", "--kind", "dense", "--n", "40", "--seed", "3", "--out", "g"],
        d,
    );
    assert_eq!(out.status.code(), Some(0));
    for method in ["newton", "jacobi-newton", "gs-newton"] {
        let out = pwls(
            &[
                "solve",
                "--manifest",
                "g/manifest.json",
                "--method",
                method,
                "--out",
                "r.json",
            ],
            d,
        );
        assert_eq!(out.status.code(), Some(0), "{method}: {}", stderr(&out));
        let report = json(&out);
        assert_eq!(report["method"], method);
        assert!(report["final_residual"].as_f64().unwrap() <= 1e-5);
        let saved: Value = serde_json::from_str(&fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
        assert_eq!(saved["x"], report["x"]);
    }
    let out = pwls(
        &[
            "solve",
            "--matrix",
            "g/T.mtx",
            "--rhs",
            "g/b.mtx",
            "--method",
            "gs-newton",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn other_statuses_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("swap.mtx"),
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1.0\n2 1 1.0\n",
    )
    .unwrap();
    write_vector(&d.join("b.txt"), &[1.0, 2.0]);
    let out = pwls(&["solve", "--matrix", "swap.mtx", "--rhs", "b.txt"], d);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert_eq!(json(&out)["status"]["kind"], "singular_step");

    pwls(&["generate", "--kind", "dense", "--n", "30", "--out", "g"], d);
    let out = pwls(
        &[
            "solve",
            "--manifest",
            "g/manifest.json",
            "--method",
            "jacobi-newton",
            "--max-iter",
            "1",
        ],
        d,
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"]["kind"], "max_iterations");
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = pwls(&["solve", "--matrix", "missing.mtx", "--rhs", "missing.txt"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("missing.mtx"));
    assert!(out.stdout.is_empty());

    fs::write(
        d.join("bad.mtx"),
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 oops\n",
    )
    .unwrap();
    write_vector(&d.join("b.txt"), &[1.0, 2.0]);
    let out = pwls(&["solve", "--matrix", "bad.mtx", "--rhs", "b.txt"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("bad.mtx:3"), "{}", stderr(&out));

    let out = pwls(&["solve", "--method", "bisection", "--manifest", "x.json"], d);
    assert_eq!(out.status.code(), Some(1));
    let out = pwls(&["--help"], d);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn analyze_reports_structure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pwls(&["generate", "--canonical", "spd_3cycle", "--out", "c"], d);
    let out = pwls(&["analyze", "--manifest", "c/manifest.json", "--brute-force"], d);
    assert_eq!(out.status.code(), Some(0));
    let a = json(&out);
    assert_eq!(a["spd"], true);
    assert_eq!(a["sdd"], false);
    assert_eq!(a["sassenfeld"], false);
    assert_eq!(a["solutions"].as_array().unwrap().len(), 1);

    pwls(&["generate", "--canonical", "diagdom_nosolution", "--out", "n"], d);
    let a = json(&pwls(&["analyze", "--manifest", "n/manifest.json", "--brute-force"], d));
    assert_eq!(a["solutions"].as_array().unwrap().len(), 0);

    pwls(
        &[
            "generate", "--kind", "diagonal", "--n", "6", "--seed", "1", "--out", "diag",
        ],
        d,
    );
    let a = json(&pwls(
        &["analyze", "--manifest", "diag/manifest.json", "--brute-force"],
        d,
    ));
    let listed = a["diagonal"]["solutions"].as_array().unwrap().len();
    assert_eq!(listed, a["solutions"].as_array().unwrap().len());
}

#[test]
fn generation_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for out in ["a", "b"] {
        let o = pwls(
            &[
                "generate", "--kind", "sparse", "--n", "1000", "--seed", "7", "--out", out,
            ],
            d,
        );
        assert_eq!(o.status.code(), Some(0));
    }
    for file in ["T.mtx", "b.mtx", "manifest.json"] {
        assert_eq!(
            fs::read(d.join("a").join(file)).unwrap(),
            fs::read(d.join("b").join(file)).unwrap()
        );
    }
}

#[test]
fn ave_round_trip_through_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pwls(
        &["generate", "--kind", "dense", "--n", "5", "--seed", "2", "--out", "p"],
        d,
    );
    let o = pwls(
        &[
            "transform",
            "--manifest",
            "p/manifest.json",
            "--to",
            "pwls-to-ave",
            "--out",
            "a",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = pwls(
        &[
            "transform",
            "--manifest",
            "a/manifest.json",
            "--to",
            "ave-to-pwls",
            "--out",
            "back",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(0));
    let (orig, _) = pwls::io::load_problem(&d.join("p/manifest.json")).unwrap();
    let (back, _) = pwls::io::load_problem(&d.join("back/manifest.json")).unwrap();
    assert_eq!(orig.rhs(), back.rhs());
    let (t0, t1) = (orig.matrix().to_dense(), back.matrix().to_dense());
    for i in 0..5 {
        for j in 0..5 {
            let (u, v) = (t0.get(i, j), t1.get(i, j));
            assert!((u - v).abs() <= 4.0 * f64::EPSILON * (1.0 + u.abs()));
        }
    }
}

#[test]
fn qp_transform_yields_kkt_point() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("q.mtx"),
        "%%MatrixMarket matrix array real general\n2 2\n4\n1\n1\n3\n",
    )
    .unwrap();
    write_vector(&d.join("lin.txt"), &[-1.0, 2.0]);
    let o = pwls(
        &[
            "transform",
            "--matrix",
            "q.mtx",
            "--rhs",
            "lin.txt",
            "--to",
            "qp-to-pwls",
            "--out",
            "w",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = pwls(&["solve", "--manifest", "w/manifest.json"], d);
    assert_eq!(o.status.code(), Some(0));
    let x: Vec<f64> = serde_json::from_value(json(&o)["x"].clone()).unwrap();
    // Minimizer of 2z₁² + z₁z₂ + 1.5z₂² − z₁ + 2z₂ over z ≥ 0 is (1/4, 0).
    assert!((x[0].max(0.0) - 0.25).abs() <= 1e-9);
    assert_eq!(x[1].max(0.0), 0.0);
}

#[test]
fn bench_counts_records_and_curves() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = pwls(
        &[
            "bench", "--kind", "dense", "--n", "30", "--count", "10", "--seed", "5", "--jobs", "2", "--out", "bench",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let b = json(&o);
    assert_eq!(b["records"].as_array().unwrap().len(), 30);
    assert_eq!(b["profiles"].as_array().unwrap().len(), 3);
    let csv = fs::read_to_string(d.join("bench/records.csv")).unwrap();
    assert_eq!(csv.lines().count(), 31);
    assert!(d.join("bench/profile.csv").exists());

    fs::write(
        d.join("grid.json"),
        r#"{"kind": "diagonal", "n": 4, "count": 5, "seed": 9}"#,
    )
    .unwrap();
    let o = pwls(
        &[
            "bench",
            "--grid",
            "grid.json",
            "--methods",
            "newton,gs-newton",
            "--repeats",
            "1",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let b = json(&o);
    assert_eq!(b["records"].as_array().unwrap().len(), 10);
    assert_eq!(b["records"][0]["problem_id"], "diagonal-n4-s9");
}

#[test]
fn boussinesq_writes_outputs_and_accepts_refined_start() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = pwls(&["boussinesq", "--N", "5", "--days", "2", "--out", "coarse"], d);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let run = json(&o);
    assert_eq!(run["N"], 5);
    let days = run["days"].as_array().unwrap();
    assert_eq!(days.len(), 2);
    let v0 = run["initial_volume"].as_f64().unwrap();
    let v1 = days[0]["volume"].as_f64().unwrap();
    assert!(((v0 - v1) / 864_000.0 - 1.0).abs() <= 1e-6);
    for f in ["days.json", "levels.json", "profile.csv"] {
        assert!(d.join("coarse").join(f).exists(), "{f}");
    }
    let profile = fs::read_to_string(d.join("coarse/profile.csv")).unwrap();
    assert_eq!(profile.lines().next().unwrap(), "x,bottom,day0,day1,day2");
    assert_eq!(profile.lines().count(), 1 + 11);

    let o = pwls(
        &[
            "boussinesq",
            "--N",
            "10",
            "--days",
            "2",
            "--method",
            "gs-newton",
            "--warm-start",
            "refine:coarse/levels.json",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = pwls(
        &[
            "boussinesq",
            "--N",
            "6",
            "--days",
            "1",
            "--warm-start",
            "refine:coarse/levels.json",
        ],
        d,
    );
    assert_eq!(o.status.code(), Some(1));
}
