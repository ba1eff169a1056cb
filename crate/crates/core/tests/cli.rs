use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tinj::amplitude::LogicalStateForm;
use tinj::cli::{self, RunManifest};
use tinj::layout::CodeLayout;
use tinj::noise_sim::ExperimentResult;
use tinj::postselect::LookupTable;

fn tinj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tinj")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

fn manifest(out: &Path) -> RunManifest {
    serde_json::from_str(&fs::read_to_string(cli::manifest_path(out)).unwrap()).unwrap()
}

#[test]
fn layout_prints_parseable_json() {
    for variant in ["rotated", "unrotated"] {
        let o = tinj(&["layout", "-d", "3", "--variant", variant]);
        assert_eq!(code(&o), 0);
        let l = CodeLayout::from_json(&stdout(&o)).unwrap();
        assert_eq!(l.distance, 3);
        assert!(l.validate().is_ok());
    }
}

#[test]
fn layout_file_feeds_derive() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("l.json");
    let o = tinj(&["layout", "-d", "3", "--variant", "rotated", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let m = manifest(&path);
    assert_eq!(m.command, "layout");
    assert_eq!(m.output_digest, cli::sha256_hex(&fs::read(&path).unwrap()));
    let a = tinj(&["derive", "--layout", path.to_str().unwrap(), "-t", "x=0000 z=0110"]);
    let b = tinj(&["derive", "-d", "3", "--variant", "rotated", "-t", "x=0000 z=0110"]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let form: LogicalStateForm = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(form.trajectory.to_string(), "x=0000 z=0110");
}

#[test]
fn derive_trace_has_term_tables() {
    let o = tinj(&["derive", "-d", "3", "-t", "x=000000 z=000011", "--trace"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["z_terms", "projected", "ref0", "ref1", "form"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn spans_reproduce_golden_d3_angles() {
    let golden: serde_json::Value =
        serde_json::from_str(include_str!("../testdata/d3_bloch_angles.json")).unwrap();
    let theta = golden["theta"].as_f64().unwrap().to_string();
    let phi = golden["phi"].as_f64().unwrap().to_string();
    let o = tinj(&["spans", "-d", "3", "--trivial-x", "--thetas", &theta, "--phis", &phi]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 64);
    let angles = golden["angles"].as_object().unwrap();
    for r in rows {
        let z = r[2].split("z=").nth(1).unwrap();
        let want = angles[z].as_array().unwrap();
        let tl: f64 = r[3].parse().unwrap();
        let pl: f64 = r[4].parse().unwrap();
        assert!((tl - want[0].as_f64().unwrap()).abs() < 1e-9, "{z}");
        assert!(wrap(pl - want[1].as_f64().unwrap()).abs() < 1e-9, "{z}");
    }
}

#[test]
fn spans_at_distance_one_are_the_identity() {
    let o = tinj(&["spans", "-d", "1", "--thetas", "0.3,1.2,2.9", "--phis=-1.0,0.5"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 6);
    for r in rows {
        let v: Vec<f64> = [0, 1, 3, 4, 5].iter().map(|&i| r[i].parse().unwrap()).collect();
        assert!((v[0] - v[2]).abs() < 1e-12);
        assert!(wrap(v[1] - v[3]).abs() < 1e-12);
        assert!((v[4] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn spans_probabilities_sum_to_one_per_rotation() {
    let o = tinj(&["spans", "-d", "2"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 8 * 8 * 16);
    let mut sums: HashMap<(String, String), f64> = HashMap::new();
    for r in &rows {
        *sums.entry((r[0].clone(), r[1].clone())).or_default() += r[5].parse::<f64>().unwrap();
    }
    assert_eq!(sums.len(), 64);
    for (k, s) in sums {
        assert!((s - 1.0).abs() < 1e-12, "{k:?} {s}");
    }
}

#[test]
fn enumerate_lists_every_trajectory() {
    let o = tinj(&["enumerate", "-d", "2", "--variant", "rotated"]);
    assert_eq!(code(&o), 0);
    let forms: Vec<LogicalStateForm> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(forms.len(), 8);
    let o = tinj(&["enumerate", "-d", "3", "--trivial-x"]);
    assert_eq!(stdout(&o).lines().count(), 64);
}

#[test]
fn verify_passes_and_reports_csv() {
    let o = tinj(&["verify", "-d", "2", "--theta", "0.7", "--phi", "2.0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_rows(&stdout(&o)).len(), 16);
    let o = tinj(&["verify", "-d", "3", "--variant", "rotated", "--rotations", "3", "--sample", "20", "--seed", "5"]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_rows(&stdout(&o)).len(), 60);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&tinj(&["frobnicate"])), 2);
    assert_eq!(code(&tinj(&["layout", "-d", "0"])), 2);
    assert_eq!(code(&tinj(&["derive", "-d", "2", "-t", "x=0 z=01"])), 2);
    assert_eq!(code(&tinj(&["derive", "-d", "2", "-t", "x=0a z=01"])), 2);
    assert_eq!(code(&tinj(&["simulate", "-d", "2", "--shots", "10"])), 2);
    assert_eq!(code(&tinj(&["pipeline", "-d", "2", "--shots", "10"])), 2);
    assert_eq!(code(&tinj(&["verify", "-d", "2", "--sample", "3"])), 2);
    assert_eq!(code(&tinj(&["simulate", "-d", "2", "--p", "0.7", "--seed", "1"])), 2);
    assert_eq!(code(&tinj(&["simulate", "-d", "2", "--variant", "unrotated", "--seed", "1"])), 2);
}

#[test]
fn size_guards_exit_three() {
    assert_eq!(code(&tinj(&["enumerate", "-d", "5"])), 3);
    assert_eq!(code(&tinj(&["simulate", "-d", "5", "--shots", "1", "--seed", "1"])), 3);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&tinj(&["--help"])), 0);
    assert_eq!(code(&tinj(&["--version"])), 0);
}

#[test]
fn simulate_manifest_reruns_to_the_same_digest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.json");
    let csv = dir.path().join("shots.csv");
    let args = [
        "simulate", "-d", "2", "--p", "0.01", "--shots", "400", "--seed", "77", "--shots-csv",
        csv.to_str().unwrap(), "-o", out.to_str().unwrap(),
    ];
    assert_eq!(code(&tinj(&args)), 0);
    let m = manifest(&out);
    assert_eq!(m.seed, Some(77));
    assert_eq!(m.tool_version, env!("CARGO_PKG_VERSION"));
    assert_eq!(m.argv, args);
    let result: ExperimentResult = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(result.config.shots, 400);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 401);
    let first = fs::read(&out).unwrap();
    let argv: Vec<&str> = m.argv.iter().map(String::as_str).collect();
    assert_eq!(code(&tinj(&argv)), 0);
    assert_eq!(fs::read(&out).unwrap(), first);
    assert_eq!(manifest(&out).output_digest, m.output_digest);
}

#[test]
fn postselect_reads_experiment_files() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.json");
    let eval = dir.path().join("eval.json");
    let table = dir.path().join("table.json");
    let out = dir.path().join("filtered.json");
    for (p, seed) in [(&train, "3"), (&eval, "4")] {
        let o = tinj(&["simulate", "-d", "2", "--p", "0.005", "--shots", "2000", "--seed", seed, "-o", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    let o = tinj(&[
        "postselect", "-i", train.to_str().unwrap(), "--eval", eval.to_str().unwrap(), "--budget", "0.3",
        "--table-out", table.to_str().unwrap(), "-o", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let t: LookupTable = serde_json::from_str(&fs::read_to_string(&table).unwrap()).unwrap();
    assert!(t.whitelist_frequency() >= 0.3 - 1e-9);
    let f: cli::Filtered = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(f.whitelist, t.whitelist);
    assert!(f.postselected.accepted > 0);
    assert_eq!(manifest(&out).inputs.len(), 2);
    assert_eq!(code(&tinj(&["postselect", "-i", "/nonexistent.json"])), 1);
}

#[test]
fn pipeline_writes_every_artefact() {
    let dir = tempfile::tempdir().unwrap();
    let o = tinj(&[
        "pipeline", "-d", "2", "--p", "0.003", "--shots", "1000", "--seed", "12", "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    for name in ["train.json", "eval.json", "table.json", "summary.json"] {
        let p = dir.path().join(name);
        assert_eq!(manifest(&p).output_digest, cli::sha256_hex(&fs::read(&p).unwrap()), "{name}");
    }
    let s: cli::PipelineSummary =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(s.train.seed, 12);
    assert_eq!(s.eval.seed, 13);
}
