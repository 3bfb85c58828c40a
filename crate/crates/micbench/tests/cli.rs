use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn micbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_micbench"))
        .args(args)
        .env_remove("MICBENCH_THREADS")
        .output()
        .expect("spawn micbench")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const Z_UP: &str = r#"{"d":2,"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]}"#;
const Z_BASIS: &str = r#"[{"d":2,"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]},
                          {"d":2,"re":[[0,0],[0,1]],"im":[[0,0],[0,0]]}]"#;

#[test]
fn volume_qubit_ratio() {
    let o = micbench(&["volume", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("2,"));
    assert_eq!(row.split(',').nth(3), Some("0.302299894039"));
    assert!(stderr(&o).starts_with("micbench volume: "));
}

#[test]
fn volume_table_has_one_row_per_dimension() {
    let o = micbench(&["volume", "--table", "2..8"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let ratios: Vec<f64> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 7);
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn volume_needs_a_dimension() {
    assert_eq!(micbench(&["volume"]).status.code(), Some(2));
    assert_eq!(
        micbench(&["volume", "--table", "5..2"]).status.code(),
        Some(2)
    );
}

#[test]
fn majorize_is_reflexive() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(dir.path(), "x.csv", "# weights\n0.5\n0.3\n0.2\n");
    let o = micbench(&["majorize", "--x", &x, "--y", &x]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("majorizes,majorizes,true"));
}

#[test]
fn majorize_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let flat = write(dir.path(), "flat.csv", "0.25,0.25,0.25,0.25\n");
    let peaked = write(dir.path(), "peaked.csv", "0.7,0.1,0.1,0.1\n");
    assert_eq!(
        micbench(&["majorize", "--x", &peaked, "--y", &flat])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        micbench(&["majorize", "--x", &flat, "--y", &peaked])
            .status
            .code(),
        Some(1)
    );

    let x = write(dir.path(), "x.csv", "4,1,1\n");
    let y = write(dir.path(), "y.csv", "2,2,1\n");
    assert_eq!(
        micbench(&["majorize", "--log", "--x", &x, "--y", &y])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        micbench(&["majorize", "--x", &x, "--y", &y]).status.code(),
        Some(1)
    );
    assert_eq!(
        micbench(&["majorize", "--weak", "--x", &x, "--y", &y])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn sic_then_phi_then_distance() {
    let dir = tempfile::tempdir().unwrap();
    let o = micbench(&["sic", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let mic = write(dir.path(), "mic.json", &stdout(&o));

    let o = micbench(&["phi", "--mic", &mic, "--proportional"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: Vec<Vec<f64>> = stdout(&o)
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let want = if i == j { 2.5 } else { -0.5 };
            assert!((v - want).abs() < 1e-9, "phi[{i}][{j}] = {v}");
        }
    }

    let o = micbench(&[
        "distance",
        "--mic",
        &mic,
        "--proportional",
        "--norm",
        "schatten:1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let fields: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[0], "schatten:1");
    assert!((fields[1].parse::<f64>().unwrap() - 6.0).abs() < 1e-8);
}

#[test]
fn mic_without_proportional_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let mic = write(
        dir.path(),
        "mic.json",
        &stdout(&micbench(&["sic", "--d", "2"])),
    );
    assert_eq!(micbench(&["phi", "--mic", &mic]).status.code(), Some(2));
}

#[test]
fn sic_search_reproduces_with_seed() {
    let a = micbench(&[
        "--seed", "3", "sic", "--d", "3", "--search", "--format", "fiducial",
    ]);
    let b = micbench(&[
        "sic", "--d", "3", "--search", "--format", "fiducial", "--seed", "3",
    ]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stderr(&a).contains("seed=3"));
}

#[test]
fn unknown_dimension_without_search() {
    let o = micbench(&["sic", "--d", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--search"));
}

#[test]
fn born_via_phi_matches_and_ltp_does_not() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "state.json", Z_UP);
    let povm = write(dir.path(), "povm.json", Z_BASIS);
    let mic = stdout(&micbench(&["sic", "--d", "2"]));
    let process = write(dir.path(), "process.json", &format!(r#"{{"mic": {mic}}}"#));
    let o = micbench(&[
        "born",
        "--state",
        &state,
        "--povm",
        &povm,
        "--via-phi",
        "--process",
        &process,
        "--proportional",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("outcome,q_operator,q_phi,ltp"));
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(first[1], 1.0);
    assert!((first[2] - 1.0).abs() < 1e-9);
    assert!((first[3] - 2.0 / 3.0).abs() < 1e-9);
    assert!(out.contains("# max_gap"));

    let o = micbench(&[
        "born",
        "--state",
        &state,
        "--povm",
        &povm,
        "--via-phi",
        "--process",
        &process,
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--proportional"));
}

#[test]
fn via_phi_requires_process() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "state.json", Z_UP);
    let povm = write(dir.path(), "povm.json", Z_BASIS);
    assert_eq!(
        micbench(&["born", "--state", &state, "--povm", &povm, "--via-phi"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn degenerate_process_is_ill_conditioned() {
    let dir = tempfile::tempdir().unwrap();
    let mic = stdout(&micbench(&["sic", "--d", "2"]));
    let posts = [Z_UP; 4].join(",");
    let process = write(
        dir.path(),
        "degenerate.json",
        &format!(r#"{{"mic": {mic}, "post_states": [{posts}]}}"#),
    );
    let o = micbench(&["phi", "--process", &process]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("ill-conditioned"));
}

#[test]
fn malformed_json_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"d\": 2,");
    let povm = write(dir.path(), "povm.json", Z_BASIS);
    let o = micbench(&["born", "--state", &bad, "--povm", &povm]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.json"));
}

#[test]
fn ensemble_output_is_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"d": 2, "n_samples": 64, "master_seed": 1}"#,
    );
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("out{threads}"));
        let o = micbench(&[
            "ensemble",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
            "--seed",
            "11",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stderr(&o).contains("\"master_seed\":11"));
        outputs.push((
            o.stdout,
            fs::read(out.join("report.json")).unwrap(),
            fs::read(out.join("samples.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn ensemble_threads_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"d": 2, "n_samples": 4, "master_seed": 1}"#,
    );
    let o = Command::new(env!("CARGO_BIN_EXE_micbench"))
        .args([
            "ensemble",
            "--config",
            &cfg,
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ])
        .env("MICBENCH_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("threads=2"));
}

#[test]
fn ensemble_rejects_unknown_config_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"d": 2, "n_samples": 4, "master_seed": 1, "colour": 3}"#,
    );
    let o = micbench(&[
        "ensemble",
        "--config",
        &cfg,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
