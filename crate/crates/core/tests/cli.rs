//! The installed binary: exit codes and environment handling.

use std::process::{Command, Output};

fn oppk(args: &[&str], budget: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oppk"));
    cmd.args(args).env_remove("OPPK_BUDGET");
    if let Some(b) = budget {
        cmd.env("OPPK_BUDGET", b);
    }
    cmd.output().expect("spawn oppk")
}

#[test]
fn exit_codes() {
    let o = oppk(&["classify", "13421773"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("over_psp=true"));

    let o = oppk(&["classify", "4", "--base", "2"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n must be odd"));

    let n = (1_000_003u128 * 1_000_033).to_string();
    assert_eq!(oppk(&["classify", &n], Some("0")).status.code(), Some(3));
    assert_eq!(oppk(&["classify", "15"], Some("x")).status.code(), Some(2));
    assert_eq!(oppk(&["wieferich", "--max-p", "10000000000000"], None).status.code(), Some(4));
}

#[test]
fn repeated_runs_match() {
    let args = ["search", "--limit", "200000", "--json"];
    let first = oppk(&args, None).stdout;
    assert!(!first.is_empty());
    assert_eq!(oppk(&args, None).stdout, first);
}
