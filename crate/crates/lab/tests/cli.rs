//! Exit codes of the real process; the command surface itself is tested
//! in-process next to `dispatch`.

use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loe-lab")).args(args).output().expect("spawn loe-lab")
}

#[test]
fn process_exit_codes() {
    let out = lab(&["weights", "--dA", "2", "--dB", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with(r#"{"d_A":2"#));
    assert_eq!(lab(&["--version"]).status.code(), Some(0));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(lab(&["weights", "--dA", "1", "--dB", "3"]).status.code(), Some(1));

    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("p.json");
    std::fs::write(&cfg, r#"{"experiment": "page_check", "model": {"L": 2}, "n_a": [1], "samples": 2, "seed": 3}"#)
        .unwrap();
    let dir = tmp.path().join("out");
    let out = lab(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
