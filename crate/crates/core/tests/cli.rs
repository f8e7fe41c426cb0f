use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forest-rotation")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .map(|rest| rest.trim().to_owned())
        .unwrap_or_else(|| panic!("{key} missing in\n{text}"))
}

#[test]
fn solve_reports_faustmann_rotation() {
    for (forest, expected) in [("coastal", 43.0), ("boreal", 42.0)] {
        let o = cli(&["solve", "--forest", forest, "--pc", "0", "--pf", "50", "--r", "0.05", "--c", "0"]);
        assert!(o.status.success());
        let text = stdout(&o);
        assert_eq!(field(&text, "classification"), "interior");
        let t1: f64 = field(&text, "first_rotation").split_whitespace().next().unwrap().parse().unwrap();
        assert!((t1 - expected).abs() <= 1.0);
    }
}

#[test]
fn solve_json_and_custom_growth() {
    let o = cli(&["solve", "--growth", "0.000573,3.7819,-0.030965,0.1824", "--pc", "30", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classification"], "interior");
    assert_eq!(v["schedule"]["lengths"].as_array().unwrap().len(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["solve", "--rho", "0.06"]).status.code(), Some(1));
    assert_eq!(cli(&["solve", "--forest", "tundra"]).status.code(), Some(1));
    assert_eq!(cli(&["solve", "--bogus"]).status.code(), Some(1));
    assert_eq!(cli(&["solve", "--pf", "0"]).status.code(), Some(2));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn rotations_flag_sets_chain_length() {
    let o = cli(&["solve", "--rotations", "3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schedule"]["lengths"].as_array().unwrap().len(), 3);
    let o = cli(&["solve", "--terminal-t", "60", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schedule"]["lengths"][4], 60.0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"forest": "boreal", "econ": {"p_c": 150, "rho": 0.03}, "chain": {"t_cap": 200}}"#).unwrap();
    let p = path.to_str().unwrap();
    let text = stdout(&cli(&["solve", "--config", p]));
    assert_eq!(field(&text, "model"), "boreal");
    assert_eq!(field(&text, "classification"), "no_harvest");
    let text = stdout(&cli(&["solve", "--config", p, "--pc", "0"]));
    assert_eq!(field(&text, "classification"), "interior");
    std::fs::write(&path, r#"{"econ": {"p_c": 150}, "extra": 1}"#).unwrap();
    assert_eq!(cli(&["solve", "--config", p]).status.code(), Some(1));
}

#[test]
fn current_age_verb() {
    let text = stdout(&cli(&["current-age", "--forest", "coastal", "--pc", "50", "--rho", "0.02"]));
    assert_eq!(field(&text, "status"), "found");
    let tau: f64 = field(&text, "tau").split_whitespace().next().unwrap().parse().unwrap();
    assert!(tau > 40.0 && tau < 50.0);
}

fn sweep(dir: &Path, name: &str, extra: &[&str]) -> Vec<u8> {
    let out = dir.join(name);
    let mut args = vec!["sweep", "--forest", "coastal", "--betas", "0", "--pc-axis", "0:100:25", "--rho-axis", "0,0.01,0.02", "-o"];
    args.push(out.to_str().unwrap());
    args.extend_from_slice(extra);
    let o = cli(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("15 cells:"));
    std::fs::read(out).unwrap()
}

#[test]
fn sweep_and_isocurves_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let a = sweep(dir.path(), "a.csv", &[]);
    let b = sweep(dir.path(), "b.csv", &["--workers", "2"]);
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("model,beta,rho,pc,quantity,value,classification,residual_max,runtime_ms\n"));
    assert_eq!(text.lines().count(), 16);
    assert!(text.lines().skip(1).all(|l| l.ends_with(',')));

    let timed = String::from_utf8(sweep(dir.path(), "t.csv", &["--timing"])).unwrap();
    assert!(timed.lines().skip(1).all(|l| !l.ends_with(',')));

    let input = dir.path().join("a.csv");
    let o = cli(&["isocurves", "-i", input.to_str().unwrap(), "--levels", "50"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("level,segment_id,pc,rho\n"));
    assert!(text.lines().count() > 2);
}

#[test]
fn validate_verb_passes() {
    let o = cli(&["validate"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("36 scenarios, 0 failed"));
}
