use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stepprop"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stepprop-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr_record(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).expect("no error record on stderr");
    serde_json::from_str(line).unwrap()
}

#[test]
fn rates_match_the_closed_form_for_a_sharp_step() {
    let out = run(&["--family", "heaviside", "--V0", "1", "rates", "--k-min", "2", "--k-max", "3", "--n", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "k,reflection,transmission,sum_minus_one");
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let k1 = (v[0] * v[0] - 2.0).sqrt();
        let r = ((v[0] - k1) / (v[0] + k1)).powi(2);
        assert!((v[1] - r).abs() < 1e-14, "{line}");
        assert!(v[3].abs() < 1e-14);
        // 17 significant digits
        let mantissa = line.split(',').next().unwrap().split('e').next().unwrap();
        assert_eq!(mantissa.replace(['.', '-'], "").len(), 17);
    }
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = scratch("malformed");
    let cfg = dir.join("model.json");
    std::fs::write(&cfg, "{\"family\": \"heaviside\", \"m\": ").unwrap();
    let target = dir.join("rates.csv");
    let out = run(&["--config", cfg.to_str().unwrap(), "--out", target.to_str().unwrap(), "rates"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_record(&out)["exit_code"], 2);
    assert!(!target.exists());
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = scratch("unknown");
    let cfg = dir.join("model.json");
    std::fs::write(&cfg, r#"{"family": "woodssaxon", "m": 1, "V0": 1, "alpha": 1, "hbar": 1, "beta": 2}"#).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "rates"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_parameters_exit_2() {
    let out = run(&["--m", "-1", "rates"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--family", "heaviside", "propagate", "--x0", "-2", "--x1", "3", "--t", "1", "--theta", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_budget_exits_3_with_a_record() {
    let out = run(&["--family", "heaviside", "propagate", "--x0", "-2", "--x1", "3", "--t", "1.5", "--max-evals", "30"]);
    assert_eq!(out.status.code(), Some(3));
    let rec = stderr_record(&out);
    assert_eq!(rec["status"], "error");
    assert_eq!(rec["exit_code"], 3);
    assert_eq!(rec["kind"], "NonConvergence");
    assert_eq!(rec["command"], "propagate");
}

#[test]
fn replay_reproduces_the_output_bytes() {
    let dir = scratch("replay");
    let first = dir.join("g.csv");
    let out = run(&[
        "--family", "heaviside", "--V0", "1.5", "--out", first.to_str().unwrap(), "propagate", "--x0", "-2", "--x1",
        "1:3:3", "--t", "1.5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta_path = dir.join("g.csv.meta.json");
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&meta_path).unwrap()).unwrap();
    assert_eq!(meta["model"]["family"], "heaviside");
    assert_eq!(meta["model"]["V0"], 1.5);
    let second = dir.join("h.csv");
    let out = run(&["--replay", meta_path.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(first).unwrap(), std::fs::read(second).unwrap());
}

#[test]
fn json_output_embeds_the_model() {
    let out = run(&["--family", "heaviside", "--format", "json", "rates", "--k-min", "2", "--n", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["model"]["family"], "heaviside");
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["--family", "heaviside", "propagate", "--x0", "-2", "--x1", "-1:3:5", "--t", "1.2"];
    let one = run(&[&["--threads", "1"], &args[..]].concat());
    let two = run(&[&["--threads", "2"], &args[..]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn recipe_writes_tables_and_metadata() {
    let dir = scratch("recipe");
    let out = run(&["reproduce", "fig1", "--out-dir", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("fig1.meta.json")).unwrap()).unwrap();
    let files = meta["files"].as_array().unwrap();
    assert!(!files.is_empty());
    for f in files {
        let text = std::fs::read_to_string(dir.join(f.as_str().unwrap())).unwrap();
        assert!(text.lines().count() > 10);
    }
}

#[test]
fn unknown_recipe_exits_2() {
    let dir = scratch("norecipe");
    let out = run(&["reproduce", "fig99", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
