mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use privsense::PauliString;
use serde_json::Value;

use common::{assert_schema, ok, privsense, privsense_bare, read_json, stderr, stdout};

const COMMANDS: [&str; 8] = ["stabilizers", "verify", "privacy", "estimate", "sweep", "histogram", "protocol", "bounds"];

#[test]
fn stabilizer_listing_round_trips() {
    let o = privsense_bare(&["stabilizers", "--n", "3"]);
    ok(&o);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines, ["-YYX", "-XYY", "-YXY", "+XXX"]);
    for l in &lines {
        assert_eq!(&l.parse::<PauliString>().unwrap().to_string(), l);
    }
    for n in 2..=6 {
        let o = privsense_bare(&["stabilizers", "--n", &n.to_string()]);
        ok(&o);
        assert_eq!(stdout(&o).lines().count(), n + 1);
    }
}

#[test]
fn bad_n_exits_with_validation_code() {
    let o = privsense_bare(&["stabilizers", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`n`"));
}

#[test]
fn help_documents_flags_and_unknown_flags_fail() {
    for cmd in COMMANDS {
        let o = privsense_bare(&[cmd, "--help"]);
        ok(&o);
        let help = stdout(&o);
        assert!(help.contains("Usage: privsense"), "{cmd}");
        if cmd != "stabilizers" {
            for flag in ["--config", "--seed", "--random-seed", "--out", "--threads", "--format"] {
                assert!(help.contains(flag), "{cmd} help lacks {flag}");
            }
        }
        let o = privsense_bare(&[cmd, "--no-such-flag"]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
    }
    let help = stdout(&privsense_bare(&["protocol", "--help"]));
    for flag in ["--protocol", "--source", "--q", "--verifier", "--transcript", "--q-grid", "--trials", "--phases", "--nu", "--m", "--c", "--shots", "--noise", "--strength", "--state"] {
        assert!(help.contains(flag), "protocol help lacks {flag}");
    }
}

#[test]
fn sampling_commands_require_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["verify", "estimate", "histogram", "protocol"] {
        let o = privsense(&[cmd], dir.path());
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(stderr(&o).contains("seed"));
    }
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn random_seed_is_printed_and_used() {
    let dir = tempfile::tempdir().unwrap();
    let o = privsense(&["verify", "--random-seed"], dir.path());
    ok(&o);
    let out = stdout(&o);
    let seed = out.lines().next().unwrap().strip_prefix("seed: ").unwrap().to_string();
    assert!(dir.path().join(format!("verify-{seed}.json")).exists());
    let o = privsense(&["verify", "--seed", "1", "--random-seed"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_follow_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let o = privsense(&["bounds", "--n", "3", "--f", "0.039", "--c", "0"], dir.path());
    ok(&o);
    let v = read_json(&dir.path().join("bounds.json"));
    assert_schema("bounds.schema.json", &v);
    assert!((v["fidelity_lower_bound"].as_f64().unwrap() - (1.0 - 6.0 * 0.039)).abs() < 1e-12);
    assert!((v["epsilon_p_upper"].as_f64().unwrap() - 24.0 / 9.0 * (6.0f64 * 0.039).sqrt()).abs() < 1e-12);
    assert!((v["threshold_fidelity"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!(stdout(&o).contains("fidelity lower bound 0.7660"));

    let o = privsense(&["bounds", "--f", "0.01", "--c", "0.25", "--m", "16", "--phi", "1.0", "--nu", "3200", "--seed", "2"], dir.path());
    ok(&o);
    let v = read_json(&dir.path().join("bounds-2.json"));
    assert_schema("bounds.schema.json", &v);
    assert_eq!(v["c_in_window"], Value::Bool(true));
    assert!((v["confidence"].as_f64().unwrap() - (1.0 - 3f64.powf(1.0 - 2.0 * 16.0 * 0.25 / 3.0))).abs() < 1e-12);
    assert_eq!(v["required_copies"].as_u64(), Some((2.0 * 16.0 * 243.0 * 3f64.ln()).ceil() as u64));
}

#[test]
fn singularity_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    for phi in ["0", "3.141592653589793"] {
        let o = privsense(&["bounds", "--f", "0.01", "--phi", phi], dir.path());
        assert_eq!(o.status.code(), Some(3));
        assert!(stderr(&o).contains("`phi`"), "{}", stderr(&o));
    }
    let o = privsense(&["estimate", "--seed", "1", "--phases", "0,0,0", "--nu", "10"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("`phi`"));
}

#[test]
fn invalid_parameters_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["bounds", "--f", "1.5"],
        &["verify", "--seed", "1", "--m", "-1"],
        &["verify", "--seed", "1", "--noise", "paper-mixture", "--strength", "2"],
        &["privacy", "--state", "plus", "--noise", "paper-mixture", "--strength", "0.1"],
        &["estimate", "--seed", "1", "--phases", "0.1,0.2"],
        &["sweep", "--threads", "0"],
    ];
    for args in cases {
        let o = privsense(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn privacy_of_reference_states() {
    let dir = tempfile::tempdir().unwrap();
    let o = privsense(&["privacy", "--state", "ghz", "--n", "3"], dir.path());
    ok(&o);
    assert!(stdout(&o).contains("epsilon_p = 0 "));
    let v = read_json(&dir.path().join("privacy.json"));
    assert_schema("privacy.schema.json", &v);
    assert!(v["epsilon_p"].as_f64().unwrap() < 1e-10);

    let o = privsense(&["privacy", "--state", "plus", "--n", "3", "--seed", "1"], dir.path());
    ok(&o);
    let v = read_json(&dir.path().join("privacy-1.json"));
    assert!((v["epsilon_p"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-10);
}

#[test]
fn sweep_table_has_analytic_column() {
    let dir = tempfile::tempdir().unwrap();
    ok(&privsense(&["sweep", "--noise", "paper-mixture", "--points", "11"], dir.path()));
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("strength,f_exact,fidelity,fidelity_lower_bound"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 11);
    for r in &rows {
        let p = 1.0 - r[0];
        assert!((r[1] - (1.0 - p) / 2.0).abs() < 1e-12);
    }

    ok(&privsense(&["sweep", "--noise", "depolarizing", "--points", "5", "--format", "json", "--seed", "3"], dir.path()));
    let v = read_json(&dir.path().join("sweep-3.json"));
    assert_schema("sweep.schema.json", &v);
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

fn csv_header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn every_artifact_matches_its_contract() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&privsense(&["verify", "--seed", "5", "--state", "experimental"], d));
    assert_schema("verify.schema.json", &read_json(&d.join("verify-5.json")));

    ok(&privsense(&["estimate", "--seed", "5", "--nu", "500", "--nu-grid", "100,200", "--repetitions", "20"], d));
    let v = read_json(&d.join("estimate-5.json"));
    assert_schema("estimate.schema.json", &v);
    assert_eq!(csv_header(&d.join("estimate-5.csv")), "nu,var_emp,var_ideal,var_privacy_ref");
    assert_eq!(v["integrity"]["nu"].as_u64(), Some(500));

    ok(&privsense(&["estimate", "--seed", "6", "--nu", "50", "--nu-grid", "10,20", "--repetitions", "5", "--format", "json"], d));
    assert!(!d.join("estimate-6.csv").exists());
    let v = read_json(&d.join("estimate-6.json"));
    assert_schema("estimate.schema.json", &v);
    assert_eq!(v["variance"].as_array().unwrap().len(), 2);

    ok(&privsense(&["histogram", "--seed", "5", "--rounds", "50", "--shots-per-round", "300", "--bins", "7", "--noise", "paper-mixture", "--strength", "0.094"], d));
    assert_schema("histogram.schema.json", &read_json(&d.join("histogram-5.json")));
    assert_eq!(csv_header(&d.join("histogram-5.csv")), "bin_left,bin_right,count");
    assert_eq!(fs::read_to_string(d.join("histogram-5.csv")).unwrap().lines().count(), 8);

    ok(&privsense(&["protocol", "--seed", "5", "--q-grid", "0,1", "--trials", "20"], d));
    assert_eq!(csv_header(&d.join("protocol-5.csv")), "q,accept_rate,compromise_rate,trials");
    ok(&privsense(&["protocol", "--seed", "6", "--q-grid", "0,1", "--trials", "20", "--format", "json"], d));
    assert_schema("adversary.schema.json", &read_json(&d.join("protocol-6.json")));

    for (seed, extra) in [("7", vec![]), ("8", vec!["--protocol", "2", "--nu", "5", "--shots", "3", "--verifier", "external"]), ("9", vec!["--source", "swap-plus", "--q", "1"])] {
        let mut args = vec!["protocol", "--seed", seed];
        args.extend(extra);
        ok(&privsense(&args, d));
        let text = fs::read_to_string(d.join(format!("protocol-{seed}.jsonl"))).unwrap();
        let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        let (summary, messages) = lines.split_last().unwrap();
        for m in messages {
            assert_schema("protocol-message.schema.json", m);
        }
        assert_schema("protocol-summary.schema.json", summary);
        assert_eq!(summary["summary"]["message_count"].as_u64(), Some(messages.len() as u64));
    }
}

#[test]
fn aborted_protocol_ends_with_abort_message() {
    let dir = tempfile::tempdir().unwrap();
    let o = privsense(&["protocol", "--seed", "9", "--source", "swap-plus", "--q", "1"], dir.path());
    ok(&o);
    assert!(stdout(&o).contains("aborted"));
    let text = fs::read_to_string(dir.path().join("protocol-9.jsonl")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[lines.len() - 2].contains("\"kind\":\"abort\""));
}

#[test]
fn config_file_is_merged_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/experimental.json");
    assert_schema("config.schema.json", &read_json(&shipped));

    let cfg = dir.path().join("run.json");
    let out = dir.path().join("from-config");
    fs::write(
        &cfg,
        serde_json::json!({
            "n": 4,
            "noise": { "kind": "depolarizing", "strength": 0.1 },
            "verification": { "shots": 10 },
            "seed": 77,
            "out": out,
        })
        .to_string(),
    )
    .unwrap();
    assert_schema("config.schema.json", &read_json(&cfg));

    let o = privsense_bare(&["verify", "--config", cfg.to_str().unwrap()]);
    ok(&o);
    let v = read_json(&out.join("verify-77.json"));
    assert_eq!(v["state"]["n"].as_u64(), Some(4));
    assert_eq!(v["report"]["tested_copies"].as_u64(), Some(50));
    assert_eq!(v["state"]["noise"]["strength"].as_f64(), Some(0.1));

    let flag_out = dir.path().join("from-flag");
    let o = privsense(&["verify", "--config", cfg.to_str().unwrap(), "--n", "3", "--seed", "78", "--strength", "0.2"], &flag_out);
    ok(&o);
    let v = read_json(&flag_out.join("verify-78.json"));
    assert_eq!(v["state"]["n"].as_u64(), Some(3));
    assert_eq!(v["state"]["noise"]["kind"].as_str(), Some("depolarizing"));
    assert_eq!(v["state"]["noise"]["strength"].as_f64(), Some(0.2));

    fs::write(&cfg, r#"{"n": 3, "sed": 1}"#).unwrap();
    let o = privsense_bare(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn custom_state_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let rho = privsense::states::experimental_like(3, 0.9, 0.01).unwrap();
    let cfg = dir.path().join("custom.json");
    let noise = serde_json::json!({ "kind": "custom", "custom_state": serde_json::from_str::<Value>(&rho.to_json().unwrap()).unwrap() });
    fs::write(&cfg, serde_json::json!({ "n": 3, "noise": noise }).to_string()).unwrap();
    let o = privsense(&["privacy", "--config", cfg.to_str().unwrap()], dir.path());
    ok(&o);
    assert!(stdout(&o).contains("custom 3-qubit state"));
    let v = read_json(&dir.path().join("privacy.json"));
    assert!(v["epsilon_p"].as_f64().unwrap() > 0.0);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_privsense"))
        .args(["bounds", "--f", "0.02"])
        .env("PRIVSENSE_OUT", dir.path())
        .output()
        .unwrap();
    ok(&o);
    assert!(dir.path().join("bounds.json").exists());
}
