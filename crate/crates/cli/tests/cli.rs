use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use modtau_cli::Report;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_modtau"));
    c.env_remove("MODTAU_PRECISION");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is a JSON report")
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

fn complex(v: &Value) -> (f64, f64) {
    (v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

#[test]
fn upsilon_from_stdin_config() {
    let o =
        run_stdin(&["upsilon", "--config", "-"], r#"{"command": "upsilon", "params": {"a": [0.23, 0], "nu": [1.1, 0], "m": [0.17, 0]}}"#);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["pass"], Value::Bool(true));
    let (re, im) = complex(&r["outputs"]["upsilon_s"]);
    assert!((re - 0.950_082_820_118_952).abs() < 1e-10 && (im + 0.288_597_593_797_215).abs() < 1e-10);
    for k in ["upsilon_hat", "at", "nut"] {
        assert!(r["outputs"][k].is_object(), "{k}");
    }
}

#[test]
fn report_keys_in_fixed_order() {
    let o = run(&["map", "--set", "a=[0.23,0]", "--set", "nu=1.1", "--set", "m=0.17"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["command", "inputs", "outputs", "residuals", "tolerances", "pass", "timing_ms", "warnings"]);
}

#[test]
fn theta_zero() {
    let o = run(&["eval", "--set", "fn=theta1", "--set", "z=[0,0]", "--set", "tau=[0,2]"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(complex(&r["outputs"]["value"]), (0.0, 0.0));
    assert_eq!(r["pass"], Value::Bool(true));
}

#[test]
fn usage_errors_exit_two() {
    let o = run_stdin(&["flow", "--config", "-"], r#"{"command": "flow"}"#);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"a\""));
    for args in [
        &["map", "--set", "a=0.23", "--set", "nu=1.1", "--set", "m=0.17", "--set", "extra=1"][..],
        &["nonsense"],
        &["eval", "--set", "fn=theta1", "--set", "z=[0,0]", "--set", "tau=[0,-1]"],
        &["map", "--set", "precision.digits=3", "--set", "a=0.23", "--set", "nu=1.1", "--set", "m=0.17"],
        &["emit_table", "--set", "kind=upsilon_grid"],
        &["verify", "--only", "nosuch"],
        &["map", "--set", "a=\"x\"", "--set", "nu=1.1", "--set", "m=0.17"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
    }
    let o = run_stdin(&["map", "--config", "-"], r#"{"command": "map", "params": {}, "colour": 1}"#);
    assert_eq!(o.status.code(), Some(2));
    let o = run_stdin(&["map", "--config", "-"], r#"{"command": "upsilon"}"#);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precision_env_var() {
    let o = bin().env("MODTAU_PRECISION", "extended").args(["eval", "--set", "fn=dedekind_eta", "--set", "tau=[0,1]"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["inputs"]["precision"]["working_precision"], "extended");
    let (re, _) = complex(&json(&o)["outputs"]["value"]);
    assert!((re - 0.768_225_422_326_056_7).abs() < 1e-14);
    let o = bin().env("MODTAU_PRECISION", "quad").args(["eval", "--set", "fn=dedekind_eta", "--set", "tau=[0,1]"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_one() {
    // a pole of the Weierstrass function
    let o = run(&["eval", "--set", "fn=weierstrass", "--set", "z=[0,0]", "--set", "tau=[0,1]"]);
    assert_eq!(o.status.code(), Some(1));
    let r = json(&o);
    assert_eq!(r["pass"], Value::Bool(false));
    assert!(!r["warnings"].as_array().unwrap().is_empty());
    assert!(r["warnings"][0]["op"].as_str().is_some());
    // the flow residual fails when the start is far too low
    let o =
        run(&["flow", "--set", "a=0.23", "--set", "nu=1.1", "--set", "m=0.17", "--set", "flow.t_max=1.2", "--set", "flow.cusp_tol=0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("connection_ratio"));
}

#[test]
fn flags_override_config_file() {
    let path = tmp("override.json");
    std::fs::write(&path, r#"{"command": "kernel", "params": {"a": [0.23, 0], "at": [0.31, 0], "m": [0.17, 0]}}"#).unwrap();
    let o = run(&["kernel", "--config", path.to_str().unwrap(), "--set", "m=0"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(complex(&r["inputs"]["m"]), (0.0, 0.0));
    let (re, im) = complex(&r["outputs"]["s"]);
    assert!(((re * re + im * im).sqrt() - 2f64.sqrt()).abs() < 1e-12);
    assert!(r["residuals"]["free_field_kernel"].as_f64().unwrap() < 1e-12);
}

#[test]
fn flow_connection_ratio() {
    let o = run(&["flow", "--set", "a=0.15", "--set", "nu=0.8", "--set", "m=0.1", "--set", "two_channel=true"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert!(r["residuals"]["connection_ratio"].as_f64().unwrap() < 1e-3);
    assert!(r["residuals"]["two_channel_q"].as_f64().unwrap() < 1e-4);
    assert_eq!(r["inputs"]["flow"]["t_max"], 8.0);
}

#[test]
fn json_round_trip_is_byte_identical() {
    for args in [
        &["upsilon", "--set", "a=0.23", "--set", "nu=1.1", "--set", "m=0.17"][..],
        &["verify", "--only", "charvar"],
        &["eval", "--set", "fn=weierstrass", "--set", "z=[0,0]", "--set", "tau=[0,1]"],
    ] {
        let o = run(args);
        let text = String::from_utf8(o.stdout).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let mut again = serde_json::to_string_pretty(&v).unwrap();
        again.push('\n');
        assert_eq!(again, text);
        let typed: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(typed.to_json(), text);
    }
}

#[test]
fn verify_only_and_determinism() {
    let o = run(&["verify", "--only", "charvar"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    let suites: Vec<&String> = r["outputs"]["suites"].as_object().unwrap().keys().collect();
    assert_eq!(suites, ["charvar"]);
    assert_eq!(r["outputs"]["seed"], 42);
    assert!(r["residuals"].as_object().unwrap().keys().all(|k| k.starts_with("charvar.")));
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    let a = strip(json(&run(&["verify", "--only", "modular,charvar", "--set", "seed=7"])));
    let b = strip(json(&run(&["verify", "--only", "modular,charvar", "--set", "seed=7"])));
    assert_eq!(a, b);
    assert_eq!(a["pass"], Value::Bool(true));
}

#[test]
fn report_written_to_out_path() {
    let path = tmp("report.json");
    let o = run(&["map", "--set", "a=0.23", "--set", "nu=1.1", "--set", "m=0.17", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "map");
}

#[test]
fn upsilon_grid_table() {
    let path = tmp("upsilon_grid.csv");
    let args = ["emit_table", "--set", "kind=upsilon_grid", "--set", "m=0.17", "--out", path.to_str().unwrap()];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["outputs"]["rows"], 400);
    let first = std::fs::read(&path).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 401);
    let header: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(header.first(), Some(&"a"));
    assert_eq!(header.last(), Some(&"flag"));
    assert!(header.contains(&"upsilon_re") && header.contains(&"upsilon_im"));
    assert!(lines[1..].iter().all(|l| l.split(',').count() == header.len()));
    let flagged = lines[1..].iter().filter(|l| !l.ends_with(",ok")).count();
    assert_eq!(r["outputs"]["flagged"], flagged);
    assert!(flagged < 100);
    run(&args);
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn kernel_grid_modulus() {
    let path = tmp("kernel_grid.csv");
    let o = run(&["emit_table", "--set", "kind=kernel_grid", "--set", "m=0", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "s_abs").unwrap();
    let mut n = 0;
    for l in lines {
        let v: f64 = l.split(',').nth(col).unwrap().parse().unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
        n += 1;
    }
    assert_eq!(n, 400);
}
