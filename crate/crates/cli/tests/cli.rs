use std::process::Command;

fn nucont(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nucont")).args(args).output().unwrap()
}

fn temp(name: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("nucont-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn lists_checkers() {
    let out = nucont(&["list-checkers"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert!(text.lines().any(|l| l == "ap-limsup"));
}

#[test]
fn builtin_run_writes_json_and_csv() {
    let dir = temp("run");
    let out = nucont(&["run", "nilpotent-demo", "--out-dir", dir.to_str().unwrap(), "--format", "json,csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["nilpotent-demo.json", "nilpotent-demo.csv", "nilpotent-demo.timing.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.join("nilpotent-demo.csv")).unwrap();
    assert!(csv.starts_with("scenario,checker,n,quantity,value\n"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn stdout_report_is_json() {
    let out = nucont(&["run", "nonuniqueness-invertible"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "fail");
    assert_eq!(v["negative_control"], true);
}

#[test]
fn parse_error_exits_2_with_path() {
    let dir = temp("bad");
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        r#"{"name": "bad", "family": {"kind": "constant", "limit": {"variant": "finite-matrix", "matrix": [[[1, 0]]]}},
            "checkers": [{"checker": "ap-limsup", "eps": "x"}]}"#,
    )
    .unwrap();
    let out = nucont(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("/checkers/0/eps"), "{err}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn seed_override_is_recorded() {
    let out = nucont(&["run", "random-upper-semicontinuity", "--seed", "7"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 7);
}
