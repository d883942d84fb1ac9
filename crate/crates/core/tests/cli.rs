use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_avalanche"))
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL: &str = "\
name = small
model = savage_hutter
[model]
theta = 20deg
theta1 = 21deg
theta2 = 31deg
beta = 0.136
ell = 0.00065m
[material]
delta0 = 18deg
[grid]
n = 40
x_min = 0m
x_max = 1m
[ic]
profile = dam_break(0.1m, 0m, 0.3m)
[solver]
t_end = 0.1s
[output]
interval = 0.05s
";

#[test]
fn run_writes_fields_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "small.scn", SMALL);
    let out = dir.path().join("out");
    let status = bin().arg("run").arg(&scn).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let fields = std::fs::read_to_string(out.join("fields.csv")).unwrap();
    assert!(fields.starts_with("t,x,h,u,b\n"));
    // Three frames of 40 cells plus the header.
    assert_eq!(fields.lines().count(), 1 + 3 * 40);
    let diags = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert_eq!(diags.lines().count(), 4);
}

#[test]
fn compare_writes_both_models() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "small.scn", SMALL);
    let out = dir.path().join("cmp");
    let status = bin().args(["compare"]).arg(&scn).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    for sub in ["savage_hutter", "mu_i"] {
        assert!(out.join(sub).join("fields.csv").is_file());
    }
    let cmp = std::fs::read_to_string(out.join("compare.csv")).unwrap();
    let mut lines = cmp.lines();
    assert_eq!(lines.next(), Some("t,front_x_sh,front_x_mui,max_speed_sh,max_speed_mui"));
    let times: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(times, ["0e0", "5e-2", "1e-1"]);
}

#[test]
fn invalid_scenario_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let scn = write(dir.path(), "bad.scn", &SMALL.replace("delta0 = 18deg", "delta0 = 18"));
    let output = bin().arg("run").arg(&scn).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("material.delta0") && err.contains("line 10"), "{err}");

    let missing = bin().arg("run").arg(dir.path().join("nope.scn")).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn compare_without_flow_rule_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let text: String = SMALL.lines().filter(|l| !l.starts_with("beta")).map(|l| format!("{l}\n")).collect();
    let scn = write(dir.path(), "sh.scn", &text);
    // Partial flow-rule parameters are rejected at parse time.
    let status = bin().arg("compare").arg(&scn).arg("--out").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn runtime_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // The output path is an existing file, so the run cannot write.
    let blocker = write(dir.path(), "blocker", "");
    let scn = write(dir.path(), "small.scn", SMALL);
    let output = bin().arg("run").arg(&scn).arg("--out").arg(&blocker).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn verify_single_check_and_unknown_suite() {
    let output = bin().args(["verify", "constitutive"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.starts_with("PASS constitutive"), "{text}");

    let unknown = bin().args(["verify", "everything"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn bundled_scenarios_run() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["dam_break.scn", "lake_at_rest.scn", "steady_incline.scn", "stopping_pile.scn"] {
        let out = dir.path().join(name);
        let output = bin().arg("run").arg(bundled(name)).arg("--out").arg(&out).output().unwrap();
        assert_eq!(output.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&output.stderr));
        assert!(out.join("diagnostics.csv").is_file());
    }
    let status = bin().arg("compare").arg(bundled("dam_break.scn")).arg("--out").arg(dir.path().join("cmp")).status().unwrap();
    assert_eq!(status.code(), Some(0));
}
