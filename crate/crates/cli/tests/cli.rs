use std::path::Path;
use std::process::{Command, Output};

fn permutangle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permutangle"))
        .args(args)
        .env_remove("PERMUTANGLE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(csv: &str, name: &str, col: usize) -> f64 {
    let line = csv.lines().find(|l| l.starts_with(&format!("{name},"))).unwrap();
    line.split(',').nth(col).unwrap().parse().unwrap()
}

#[test]
fn werner_half() {
    let out = permutangle(&["measure", "--family", "werner", "--params", "p=0.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!((field(&text, "c12", 2) - 0.25).abs() < 1e-9);
    assert!((field(&text, "n12", 2) - 0.25).abs() < 1e-9);
    assert!((field(&text, "r12", 2) - 0.5946035575).abs() < 1e-9);
    assert!(field(&text, "max_abs_diff", 3) < 1e-9);
}

#[test]
fn measure_json_has_record() {
    let out = permutangle(&["measure", "--family", "m3ts", "--params", "c12=0.6", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["record"]["family"], "m3ts");
    assert!((doc["record"]["tau"].as_f64().unwrap() - 0.64).abs() < 1e-9);
    assert!(doc["max_abs_diff"].as_f64().unwrap() < 1e-9);
}

#[test]
fn cr_rank4_three_points() {
    let out = permutangle(&["curve", "--id", "cr_rank4", "--points", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    let start = (1.0f64 / 3.0).powf(0.75);
    assert_eq!(text.lines().next(), Some("r12,c12"));
    assert_eq!(rows.len(), 3);
    assert!((rows[0].0 - start).abs() < 1e-12 && rows[0].1.abs() < 1e-12);
    let mid = (start + 1.0) / 2.0;
    assert!((rows[1].0 - mid).abs() < 1e-12);
    assert!((rows[1].1 - (3.0 * mid.powf(4.0 / 3.0) - 1.0) / 2.0).abs() < 1e-12);
    assert_eq!(rows[2], (1.0, 1.0));
}

#[test]
fn sample_is_byte_identical() {
    let args = ["sample", "--dims", "2,2,2", "--n", "100", "--seed", "7"];
    let a = permutangle(&args);
    let b = permutangle(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let threaded = Command::new(env!("CARGO_BIN_EXE_permutangle"))
        .args(args)
        .env("PERMUTANGLE_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.stdout, threaded.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next(), Some("index,rank,c12,n12,r12,tau,family"));
    assert_eq!(text.lines().count(), 101);
}

#[test]
fn tau_column_empty_for_rank_three_parents() {
    let out = permutangle(&["sample", "--dims", "2,2,3", "--n", "2", "--seed", "1"]);
    let text = stdout(&out);
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').nth(5), Some(""));
    }
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        &["sample", "--dims", "2,2,2", "--n", "10"][..],
        &["sample", "--dims", "2,3", "--n", "10", "--seed", "1"],
        &["measure", "--family", "werner", "--params", "p=1.5"],
        &["measure", "--family", "nonsense"],
        &["curve", "--id", "cr_rank9"],
        &[
            "perturb",
            "--kind",
            "werner_fig5",
            "--eps",
            "-1",
            "--n",
            "5",
            "--seed",
            "1",
        ],
        &["verify", "--region", "prop2", "--input", "/nonexistent.csv"],
        &["sample", "--bogus-flag"],
    ] {
        let out = permutangle(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"), "{args:?}");
    }
}

fn write(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path_str = path.to_str().unwrap().to_string();
    let mut all = args.to_vec();
    all.extend(["--output", &path_str]);
    assert!(permutangle(&all).status.success());
    path_str
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let rank2 = write(
        dir.path(),
        "r2.csv",
        &["sample", "--dims", "2,2,2", "--n", "300", "--seed", "3"],
    );
    let rank4 = write(
        dir.path(),
        "r4.csv",
        &["sample", "--dims", "2,2,4", "--n", "300", "--seed", "3"],
    );

    let ok = permutangle(&["verify", "--region", "prop2", "--input", &rank2]);
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["violations"], 0);
    assert_eq!(report["total"], 300);

    // Rank-4 states leave the rank-2 region.
    let bad = permutangle(&["verify", "--region", "prop2", "--input", &rank4]);
    assert_eq!(bad.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert!(report["violations"].as_u64().unwrap() > 0);

    // Regions expected to be crossed do not fail the run.
    let lower = permutangle(&["verify", "--region", "nr_rank2_lower", "--input", &rank4]);
    assert_eq!(lower.status.code(), Some(0));

    // tau is required by the tangle regions.
    let missing = permutangle(&["verify", "--region", "m3ts_max", "--input", &rank4]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(
        dir.path(),
        "s.csv",
        &["sample", "--dims", "2,2,2", "--n", "50", "--seed", "11"],
    );
    let json = write(
        dir.path(),
        "s.json",
        &[
            "sample", "--dims", "2,2,2", "--n", "50", "--seed", "11", "--format", "json",
        ],
    );
    let from_csv = permutangle::experiments::read_records_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    let from_json = permutangle::experiments::read_records_json(std::fs::File::open(&json).unwrap()).unwrap();
    assert_eq!(from_csv, from_json);
    let ok = permutangle(&["verify", "--region", "tau_identity", "--input", &json]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn figure_writes_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fig1");
    let out = permutangle(&[
        "figure",
        "--id",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
        "--n",
        "200",
        "--points",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for name in [
        "fig1_scatter.csv",
        "fig1_meta.json",
        "fig1_curve_cr_rank2_upper.csv",
        "fig1_curve_cr_rank2_lower.csv",
    ] {
        assert!(out_dir.join(name).exists(), "{name}");
    }
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["figure"], 1);
    assert_eq!(
        permutangle(&["figure", "--id", "12", "--out", out_dir.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
