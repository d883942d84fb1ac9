use std::path::Path;

use avalanche::app;
use avalanche::output::{fmt_num, COMPARE_HEADER, DIAGNOSTICS_HEADER, FIELDS_HEADER};
use avalanche::scenario::{load_scenario, parse_scenario};

fn bundled(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn parse_row(line: &str) -> Vec<f64> {
    line.split(',').map(|v| v.parse().unwrap()).collect()
}

#[test]
fn headers_are_fixed() {
    assert_eq!(FIELDS_HEADER, "t,x,h,u,b");
    assert_eq!(DIAGNOSTICS_HEADER, "t,mass,momentum,front_x,max_speed,dt");
    assert_eq!(COMPARE_HEADER, "t,front_x_sh,front_x_mui,max_speed_sh,max_speed_mui");
}

const TINY: &str = "\
name = tiny
model = savage_hutter
[material]
delta0 = 30deg
[grid]
n = 4
x_min = 0m
x_max = 1m
[ic]
profile = dam_break(1m, 0m, 0.5m)
[solver]
t_end = 0s
";

#[test]
fn initial_frame_golden() {
    let dir = tempfile::tempdir().unwrap();
    let s = parse_scenario(TINY).unwrap();
    app::run_scenario(&s, Some(dir.path())).unwrap();
    let fields = std::fs::read_to_string(dir.path().join("fields.csv")).unwrap();
    assert_eq!(
        fields,
        "t,x,h,u,b\n\
         0e0,1.25e-1,1e0,0e0,0e0\n\
         0e0,3.75e-1,1e0,0e0,0e0\n\
         0e0,6.25e-1,0e0,0e0,0e0\n\
         0e0,8.75e-1,0e0,0e0,0e0\n"
    );
    let diags = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(diags, "t,mass,momentum,front_x,max_speed,dt\n0e0,5e-1,0e0,3.75e-1,0e0,0e0\n");
}

/// Mass and momentum in diagnostics.csv agree with sums recomputed from
/// fields.csv.
#[test]
fn diagnostics_match_fields() {
    let dir = tempfile::tempdir().unwrap();
    let s = load_scenario(&bundled("dam_break.scn")).unwrap();
    let out = app::run_scenario(&s, Some(dir.path())).unwrap();
    let dx = (s.grid.x_max - s.grid.x_min) / s.grid.n as f64;
    let fields = std::fs::read_to_string(dir.path().join("fields.csv")).unwrap();
    let rows: Vec<Vec<f64>> = fields.lines().skip(1).map(parse_row).collect();
    assert_eq!(rows.len(), out.diagnostics.len() * s.grid.n);
    for (frame, d) in rows.chunks(s.grid.n).zip(&out.diagnostics) {
        assert!(frame.iter().all(|r| r[0] == d.t));
        let mass: f64 = frame.iter().map(|r| r[2] * dx).sum();
        let momentum: f64 = frame.iter().map(|r| r[2] * r[3] * dx).sum();
        assert!(((mass - d.mass) / d.mass).abs() < 1e-12);
        let scale = d.momentum.abs().max(1e-300);
        assert!(((momentum - d.momentum) / scale).abs() < 1e-12, "{momentum} vs {}", d.momentum);
    }
    let diag_text = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    for (line, d) in diag_text.lines().skip(1).zip(&out.diagnostics) {
        assert!(line.starts_with(&format!("{},{},", fmt_num(d.t), fmt_num(d.mass))));
    }
}

#[test]
fn bundled_lake_stays_at_rest() {
    let dir = tempfile::tempdir().unwrap();
    let s = load_scenario(&bundled("lake_at_rest.scn")).unwrap();
    let out = app::run_scenario(&s, Some(dir.path())).unwrap();
    assert_eq!(out.diagnostics.len(), 5);
    assert!(out.diagnostics.iter().all(|d| d.max_speed == 0.0 && d.momentum == 0.0));
}

#[test]
fn bundled_steady_incline_keeps_its_speed() {
    let dir = tempfile::tempdir().unwrap();
    let s = load_scenario(&bundled("steady_incline.scn")).unwrap();
    let out = app::run_scenario(&s, Some(dir.path())).unwrap();
    let u0 = out.diagnostics[0].max_speed;
    assert!(u0 > 0.1);
    for d in &out.diagnostics {
        assert!(((d.max_speed - u0) / u0).abs() < 1e-12);
    }
}

#[test]
fn bundled_pile_stops() {
    let dir = tempfile::tempdir().unwrap();
    let s = load_scenario(&bundled("stopping_pile.scn")).unwrap();
    let out = app::run_scenario(&s, Some(dir.path())).unwrap();
    let speeds: Vec<f64> = out.diagnostics.iter().map(|d| d.max_speed).collect();
    assert!(speeds.windows(2).all(|w| w[1] <= w[0]), "{speeds:?}");
    assert_eq!(out.final_state.hu.iter().filter(|&&m| m != 0.0).count(), 0);
}

#[test]
fn compare_with_generic_parameters_differs() {
    let dir = tempfile::tempdir().unwrap();
    let s = load_scenario(&bundled("dam_break.scn")).unwrap();
    let out = app::run_compare(&s, Some(dir.path())).unwrap();
    let a = std::fs::read(out.savage_hutter.directory.join("fields.csv")).unwrap();
    let b = std::fs::read(out.mu_i.directory.join("fields.csv")).unwrap();
    assert_ne!(a, b);
    let times_sh: Vec<f64> = out.savage_hutter.diagnostics.iter().map(|d| d.t).collect();
    let times_mui: Vec<f64> = out.mu_i.diagnostics.iter().map(|d| d.t).collect();
    assert_eq!(times_sh, times_mui);
    assert_eq!(times_sh.len(), 11);
}
