#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

pub fn privsense(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_privsense"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("PRIVSENSE_OUT")
        .output()
        .expect("binary runs")
}

/// Runs without adding `--out`, for commands that write nothing.
pub fn privsense_bare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_privsense"))
        .args(args)
        .env_remove("PRIVSENSE_OUT")
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}\nstdout: {}\nstderr: {}", o.status.code(), stdout(o), stderr(o));
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn assert_schema(schema: &str, instance: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    if let Err(e) = jsonschema::validate(&schema, instance) {
        panic!("{e} at {}", e.instance_path());
    }
}
