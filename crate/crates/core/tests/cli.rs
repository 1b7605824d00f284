use std::process::Command;

fn perdyn(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_perdyn")).args(args).output().unwrap()
}

#[test]
fn exit_codes() {
    let ok = perdyn(&["catalog", "list", "--format", "csv"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap().lines().count(), 5);
    let verdict = perdyn(&["lattes", "--p", "5", "--nmax", "2"]);
    assert_eq!(verdict.status.code(), Some(1));
    let usage = perdyn(&["per-table", "--map", "x^2", "--field", "GF(3", "--nmax", "2"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8(usage.stderr).unwrap().contains("position"));
}

#[test]
fn budget_override_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_perdyn"))
        .args(["per-table", "--map", "x^2", "--field", "GF(3)", "--nmax", "6"])
        .env("PERDYN_ENUM_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("budget"));
    let bad = Command::new(env!("CARGO_BIN_EXE_perdyn"))
        .args(["catalog", "list"])
        .env("PERDYN_MAX_DEGREE", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn seed_is_recorded() {
    let out = perdyn(&["fpp", "--aut", "basilica", "--nmax", "7", "--samples", "500", "--seed", "42"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["levels"][6]["method"], "sampled");
}
