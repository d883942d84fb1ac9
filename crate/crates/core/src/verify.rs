//! Verification suites.
//!
//! Each check runs a small problem whose answer is known independently of
//! the solver (an exact fixed point, a conserved quantity, an analytic
//! solution or a reference computation) and compares at a fixed tolerance.
//! `avalanche verify all` runs every check and prints one line per check.

use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::app;
use crate::constitutive::{self as cst, KConvention, MaterialParams, PouliquenParams, PressureState, SymTensor2};
use crate::models::{self, KPolicy, ModelConfig, ViscosityPolicy};
use crate::output;
use crate::scenario::parse_scenario;
use crate::solver::{self, Boundary, Grid1D, SimState, SolverConfig};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}`; expected `all` or one of: {1}")]
    UnknownSuite(String, String),
}

/// Result of one check.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {:<14} {:>8.3} s", self.name, self.elapsed.as_secs_f64())?;
        if let Some(b) = self.budget {
            write!(f, " (budget {} s)", b.as_secs_f64())?;
        }
        write!(f, "  {}", self.detail)
    }
}

struct Check {
    passed: bool,
    detail: String,
}

impl Check {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

type CheckResult = Result<Check, Box<dyn std::error::Error>>;

struct Criterion {
    name: &'static str,
    budget: Option<f64>,
    run: fn() -> CheckResult,
}

const CRITERIA: &[Criterion] = &[
    Criterion { name: "well_balanced", budget: Some(1.0), run: well_balanced },
    Criterion { name: "mass", budget: Some(5.0), run: mass_conservation },
    Criterion { name: "ritter", budget: Some(5.0), run: ritter_convergence },
    Criterion { name: "steady_flow", budget: Some(10.0), run: steady_flow },
    Criterion { name: "arrest", budget: Some(2.0), run: coulomb_arrest },
    Criterion { name: "coincidence", budget: Some(2.0), run: model_coincidence },
    Criterion { name: "constitutive", budget: Some(1.0), run: constitutive_sweeps },
    Criterion { name: "viscous", budget: Some(2.0), run: viscous_operator },
    Criterion { name: "determinism", budget: None, run: determinism },
];

/// Names accepted by [`run_suite`] besides `all`.
pub fn suite_names() -> Vec<&'static str> {
    CRITERIA.iter().map(|c| c.name).collect()
}

/// Runs `all` checks or the single named one, calling `report` after each.
pub fn run_suite(name: &str, mut report: impl FnMut(&Outcome)) -> Result<Vec<Outcome>, VerifyError> {
    let selected: Vec<&Criterion> = CRITERIA.iter().filter(|c| name == "all" || c.name == name).collect();
    if selected.is_empty() {
        return Err(VerifyError::UnknownSuite(name.to_string(), suite_names().join(", ")));
    }
    let mut outcomes = Vec::new();
    for c in selected {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let budget = c.budget.map(Duration::from_secs_f64);
        let (mut passed, mut detail) = match result {
            Ok(check) => (check.passed, check.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if budget.is_some_and(|b| elapsed > b) {
            passed = false;
            detail.push_str("; over time budget");
        }
        let outcome = Outcome { name: c.name, passed, detail, elapsed, budget };
        report(&outcome);
        outcomes.push(outcome);
    }
    Ok(outcomes)
}

fn deg(a: f64) -> f64 {
    a.to_radians()
}

fn sh_config(theta: f64, delta0: f64) -> ModelConfig {
    let mat = MaterialParams { d: 1e-3, rho_star: 2500.0, phi_s: 0.6, phi_int: delta0, delta0 };
    ModelConfig::savage_hutter(theta, mat, KPolicy::Constant(1.0))
}

fn flow_rule() -> PouliquenParams {
    PouliquenParams { theta1: deg(21.0), theta2: deg(31.0), beta: 0.136, ell: 6.5e-4 }
}

fn mui_config(theta: f64, viscosity: ViscosityPolicy) -> ModelConfig {
    ModelConfig::mu_i(theta, flow_rule(), 1.0, viscosity)
}

/// Solver settings for fixed step counts: the end time is never reached.
fn open_ended(bc: Boundary) -> SolverConfig {
    SolverConfig { t_end: 1e9, bc, ..SolverConfig::default() }
}

fn steps(
    state: &SimState,
    grid: &Grid1D,
    cfg: &ModelConfig,
    scfg: &SolverConfig,
    n: usize,
    mut each: impl FnMut(&SimState),
) -> Result<SimState, solver::SolverError> {
    let mut s = state.clone();
    for _ in 0..n {
        s = solver::step(&s, grid, cfg, scfg)?.0;
        each(&s);
    }
    Ok(s)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_wet_speed(s: &SimState, h_eps: f64) -> f64 {
    s.h.iter().zip(&s.hu).filter(|(&h, _)| h >= h_eps).map(|(&h, &hu)| (hu / h).abs()).fold(0.0, f64::max)
}

/// Lake at rest over a step, both models, 1000 steps.
fn well_balanced() -> CheckResult {
    let grid = Grid1D::uniform(200, 0.0, 1.0)?.with_bed(|x| if x >= 0.5 { 0.5 } else { 0.0 })?;
    let h0: Vec<f64> = grid.b.iter().map(|b| (1.0 - b).max(0.0)).collect();
    let initial = SimState::at_rest(h0);
    let scfg = open_ended(Boundary::Reflective);
    let mut worst_u: f64 = 0.0;
    let mut worst_h: f64 = 0.0;
    for cfg in [sh_config(0.0, deg(30.0)), mui_config(0.0, ViscosityPolicy::Constant(0.01))] {
        let end = steps(&initial, &grid, &cfg, &scfg, 1000, |s| {
            worst_u = worst_u.max(max_wet_speed(s, scfg.h_eps));
        })?;
        worst_h = worst_h.max(max_abs_diff(&end.h, &initial.h));
    }
    Ok(Check::new(
        worst_u < 1e-12 && worst_h < 1e-12,
        format!("max|u| = {worst_u:e} m/s, max|dh| = {worst_h:e} m (limit 1e-12)"),
    ))
}

/// Dam break between reflective walls, both models, 10^4 steps.
fn mass_conservation() -> CheckResult {
    let grid = Grid1D::uniform(200, 0.0, 1.0)?;
    let initial = SimState::at_rest(grid.x.iter().map(|&x| if x < 0.3 { 0.2 } else { 0.0 }).collect());
    let scfg = open_ended(Boundary::Reflective);
    let m0 = initial.mass(grid.dx);
    let mut worst: f64 = 0.0;
    for cfg in [sh_config(deg(25.0), deg(20.0)), mui_config(deg(25.0), ViscosityPolicy::Formula)] {
        let end = steps(&initial, &grid, &cfg, &scfg, 10_000, |_| {})?;
        worst = worst.max(((end.mass(grid.dx) - m0) / m0).abs());
    }
    Ok(Check::new(worst < 1e-12, format!("relative mass drift {worst:e} (limit 1e-12)")))
}

pub mod oracles {
    //! Reference solutions independent of the finite-volume code.

    /// Depth of the frictionless dam break onto a dry bed with initial depth
    /// `h_left` for `x < x0`, at time `t > 0`.
    pub fn ritter_depth(x: f64, t: f64, h_left: f64, x0: f64, g: f64) -> f64 {
        let c0 = (g * h_left).sqrt();
        let xi = (x - x0) / t;
        if xi <= -c0 {
            h_left
        } else if xi >= 2.0 * c0 {
            0.0
        } else {
            let c = (2.0 * c0 - xi) / 3.0;
            c * c / g
        }
    }

    /// Exact mean of [`ritter_depth`] over `[a, b]`.
    pub fn ritter_cell_average(a: f64, b: f64, t: f64, h_left: f64, x0: f64, g: f64) -> f64 {
        let c0 = (g * h_left).sqrt();
        let (xl, xr) = (x0 - c0 * t, x0 + 2.0 * c0 * t);
        // Antiderivative of the fan depth in x.
        let fan = |x: f64| -t * (2.0 * c0 - (x - x0) / t).powi(3) / (27.0 * g);
        let mut total = 0.0;
        let left = (a.min(xl), b.min(xl));
        total += h_left * (left.1 - left.0).max(0.0);
        let (fa, fb) = (a.clamp(xl, xr), b.clamp(xl, xr));
        total += fan(fb) - fan(fa);
        total / (b - a)
    }

    /// Forward-Euler integration of `d(hu)/dt = d/dx(nu h^{3/2} du/dx)` on a
    /// periodic grid of wet cells with frozen depth, using `substeps` equal
    /// steps over `duration`.
    pub fn explicit_viscous(h: &[f64], hu: &[f64], nu: f64, dx: f64, duration: f64, substeps: usize) -> Vec<f64> {
        let n = h.len();
        let dt = duration / substeps as f64;
        let a: Vec<f64> = (0..n).map(|j| nu * (0.5 * (h[j] + h[(j + 1) % n])).powf(1.5)).collect();
        let mut m = hu.to_vec();
        let mut next = vec![0.0; n];
        for _ in 0..substeps {
            for i in 0..n {
                let l = (i + n - 1) % n;
                let r = (i + 1) % n;
                let (ul, ui, ur) = (m[l] / h[l], m[i] / h[i], m[r] / h[r]);
                next[i] = m[i] + dt / (dx * dx) * (a[i] * (ur - ui) - a[l] * (ui - ul));
            }
            std::mem::swap(&mut m, &mut next);
        }
        m
    }
}

/// Reservoir depth, dam position and output time of the Ritter check.
pub const RITTER_SETUP: (f64, f64, f64) = (1.0, 0.35, 0.1);

/// L1 errors in h of the frictionless dam break on [0, 1] m against the
/// exact solution, one per grid size. The reservoir is deep enough for the
/// fan to span most of the domain.
pub fn ritter_l1_errors(sizes: &[usize]) -> Result<Vec<f64>, solver::SolverError> {
    let (h_left, x0, t_end) = RITTER_SETUP;
    let cfg = sh_config(0.0, 0.0);
    let scfg = SolverConfig { t_end, bc: Boundary::Open, ..SolverConfig::default() };
    sizes
        .iter()
        .map(|&n| {
            let grid = Grid1D::uniform(n, 0.0, 1.0)?;
            let initial = SimState::at_rest(grid.x.iter().map(|&x| if x < x0 { h_left } else { 0.0 }).collect());
            let end = solver::run(&grid, initial, &cfg, &scfg, None, |_, _| Ok::<_, solver::SolverError>(()))?;
            Ok((0..n)
                .map(|i| {
                    let a = grid.x[i] - 0.5 * grid.dx;
                    let exact = oracles::ritter_cell_average(a, a + grid.dx, t_end, h_left, x0, cfg.g);
                    (end.h[i] - exact).abs() * grid.dx
                })
                .sum())
        })
        .collect()
}

/// Observed order between n = 200 and 400; finer grids are reported for
/// context.
fn ritter_convergence() -> CheckResult {
    let errors = ritter_l1_errors(&[200, 400, 800, 1600])?;
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(Check::new(
        orders[0] >= 0.8,
        format!(
            "L1 errors {:.3e} (n=200), {:.3e} (n=400); observed order {:.3} (need >= 0.8); finer: {:.3} (400->800), {:.3} (800->1600)",
            errors[0], errors[1], orders[0], orders[1], orders[2]
        ),
    ))
}

/// Uniform flow at the steady Froude number stays put for 10 s.
fn steady_flow() -> CheckResult {
    let theta = deg(26.0);
    let h0 = 5e-3;
    let cfg = mui_config(theta, ViscosityPolicy::Formula);
    let fr = models::steady_froude(h0, theta, &flow_rule())?;
    let u0 = fr * (cfg.g * h0 * theta.cos()).sqrt();
    let grid = Grid1D::uniform(50, 0.0, 1.0)?;
    let initial = SimState::new(0.0, vec![h0; 50], vec![h0 * u0; 50]);
    let scfg = SolverConfig { t_end: 10.0, bc: Boundary::Periodic, ..SolverConfig::default() };
    let end = solver::run(&grid, initial, &cfg, &scfg, None, |_, _| Ok::<_, solver::SolverError>(()))?;
    let dev = end.h.iter().zip(&end.hu).map(|(h, hu)| ((hu / h - u0) / u0).abs()).fold(0.0, f64::max);
    Ok(Check::new(
        end.t == 10.0 && dev < 1e-6,
        format!("Fr = {fr:.6}, u = {u0:.6} m/s, max relative deviation {dev:e} after {} s (limit 1e-6)", end.t),
    ))
}

/// A pile below the friction angle is a fixed point; launched downslope it
/// slows monotonically and stops.
fn coulomb_arrest() -> CheckResult {
    let cfg = sh_config(deg(15.0), deg(30.0));
    let grid = Grid1D::uniform(200, 0.0, 2.0)?;
    let h: Vec<f64> = grid
        .x
        .iter()
        .map(|&x| {
            let z = (x - 1.0) / 0.15;
            0.05 * (-0.5 * z * z).exp()
        })
        .collect();
    let pile = SimState::at_rest(h.clone());
    let scfg = open_ended(Boundary::Open);
    let end = steps(&pile, &grid, &cfg, &scfg, 1000, |_| {})?;
    let fixed = end.h == pile.h && end.hu == pile.hu;

    let wet = |hi: f64| !models::is_dry(hi, &cfg);
    let hu: Vec<f64> = h.iter().map(|&hi| if wet(hi) { hi * 0.1 } else { 0.0 }).collect();
    let mut s = SimState::new(0.0, h, hu);
    let mut speed = max_wet_speed(&s, cfg.h_eps);
    let mut monotone = true;
    let mut stopped_at = None;
    for k in 1..=20_000 {
        s = solver::step(&s, &grid, &cfg, &scfg)?.0;
        let v = max_wet_speed(&s, cfg.h_eps);
        monotone &= v <= speed;
        speed = v;
        if s.hu.iter().all(|&m| m == 0.0) {
            stopped_at = Some((k, s.t));
            break;
        }
    }
    let detail = match stopped_at {
        Some((k, t)) => format!("static pile fixed: {fixed}; moving pile stopped after {k} steps at t = {t:.4} s, monotone: {monotone}"),
        None => format!("static pile fixed: {fixed}; moving pile did not stop, monotone: {monotone}"),
    };
    Ok(Check::new(fixed && monotone && stopped_at.is_some(), detail))
}

const COINCIDENT_SCENARIO: &str = "\
name = coincidence
model = savage_hutter
[model]
theta = 20deg
theta1 = 25deg
theta2 = 25deg
beta = 0.136
ell = 0.00065m
k = 1
chi = 1
viscosity = off
[material]
delta0 = 25deg
[grid]
n = 200
x_min = 0m
x_max = 2m
[ic]
profile = dam_break(0.1m, 0m, 0.5m)
[solver]
t_end = 0.5s
bc = reflective
[output]
interval = 0.05s
";

fn dirs_identical(a: &Path, b: &Path) -> std::io::Result<Option<String>> {
    let list = |d: &Path| -> std::io::Result<Vec<_>> {
        let mut v: Vec<_> = std::fs::read_dir(d)?.map(|e| e.map(|e| e.file_name())).collect::<Result<_, _>>()?;
        v.sort();
        Ok(v)
    };
    let (la, lb) = (list(a)?, list(b)?);
    if la != lb {
        return Ok(Some(format!("file lists differ: {la:?} vs {lb:?}")));
    }
    for name in la {
        let (pa, pb) = (a.join(&name), b.join(&name));
        if pa.is_dir() {
            if let Some(diff) = dirs_identical(&pa, &pb)? {
                return Ok(Some(diff));
            }
        } else if std::fs::read(&pa)? != std::fs::read(&pb)? {
            return Ok(Some(format!("{} differs", name.to_string_lossy())));
        }
    }
    Ok(None)
}

/// With K = 1, chi = 1, no viscosity and mu1 = mu2 = tan(delta0) the two
/// models write the same bytes.
fn model_coincidence() -> CheckResult {
    let scenario = parse_scenario(COINCIDENT_SCENARIO)?;
    let dir = tempfile::tempdir()?;
    let out = app::run_compare(&scenario, Some(dir.path()))?;
    let diff = dirs_identical(&out.savage_hutter.directory, &out.mu_i.directory)?;
    let frames = out.savage_hutter.diagnostics.len();
    let front = out.savage_hutter.diagnostics.last().and_then(|d| d.front_x);
    Ok(Check::new(
        diff.is_none() && frames > 1,
        match diff {
            None => format!("{frames} frames byte-identical, final front at {front:?} m"),
            Some(d) => d,
        },
    ))
}

/// Randomized sweeps over the closure laws.
fn constitutive_sweeps() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut failures: Vec<String> = Vec::new();
    let mut fail = |what: String| {
        if failures.len() < 5 {
            failures.push(what);
        }
    };

    // Limits and monotonicity of mu(I).
    let (mu1, mu2, i0) = (0.38, 0.64, 0.3);
    if cst::mu_of_i(0.0, mu1, mu2, i0)? != mu1 {
        fail("mu(0) != mu1".into());
    }
    if (cst::mu_of_i(1e12, mu1, mu2, i0)? - mu2).abs() > 1e-12 {
        fail("mu(I) does not approach mu2".into());
    }
    let mut is: Vec<f64> = (0..1000).map(|_| 10f64.powf(rng.random_range(-6.0..3.0))).collect();
    is.sort_by(f64::total_cmp);
    let mus = is.iter().map(|&i| cst::mu_of_i(i, mu1, mu2, i0)).collect::<Result<Vec<_>, _>>()?;
    if mus.windows(2).any(|w| w[1] < w[0]) || mus.iter().any(|&m| m < mu1 || m > mu2) {
        fail("mu(I) not monotone within [mu1, mu2]".into());
    }

    // mu(Fr, h): non-decreasing in Fr, non-increasing in h.
    let p = flow_rule();
    let h = 0.01;
    let mut frs: Vec<f64> = (0..1000).map(|_| rng.random_range(0.0..5.0)).collect();
    frs.sort_by(f64::total_cmp);
    let by_fr = frs.iter().map(|&fr| cst::mu_basal(fr, h, &p)).collect::<Result<Vec<_>, _>>()?;
    if by_fr.windows(2).any(|w| w[1] < w[0]) {
        fail("mu(Fr, h) decreases with Fr".into());
    }
    let mut hs: Vec<f64> = (0..1000).map(|_| rng.random_range(1e-4..0.1)).collect();
    hs.sort_by(f64::total_cmp);
    let by_h = hs.iter().map(|&h| cst::mu_basal(1.0, h, &p)).collect::<Result<Vec<_>, _>>()?;
    if by_h.windows(2).any(|w| w[1] > w[0]) {
        fail("mu(Fr, h) increases with h".into());
    }

    // Along the Bagnold profile both friction laws agree.
    let mut worst_jop: f64 = 0.0;
    for _ in 0..1000 {
        let t1 = rng.random_range(deg(15.0)..deg(30.0));
        let params = PouliquenParams {
            theta1: t1,
            theta2: t1 + rng.random_range(deg(1.0)..deg(20.0)),
            beta: rng.random_range(0.05..0.5),
            ell: rng.random_range(1e-4..1e-2),
        };
        let mat = MaterialParams { d: rng.random_range(1e-4..5e-3), rho_star: 2500.0, phi_s: 0.6, phi_int: 0.6, delta0: 0.5 };
        let i = 10f64.powf(rng.random_range(-4.0..0.0));
        let h = rng.random_range(1e-3..0.1);
        let theta = rng.random_range(0.0..deg(45.0));
        let u = cst::bagnold_mean_velocity(i, h, theta, &mat, 9.81)?;
        let lhs = cst::mu_basal(cst::froude(u, h, theta, 9.81)?, h, &params)?;
        let rhs = cst::mu_of_i(i, params.mu1(), params.mu2(), cst::i_zero(h, &mat, &params)?)?;
        worst_jop = worst_jop.max(((lhs - rhs) / rhs).abs());
    }
    if worst_jop > 1e-12 {
        fail(format!("Bagnold identity off by {worst_jop:e}"));
    }

    // |tau| = mu(I) p.
    let mat = MaterialParams { d: 1e-3, rho_star: 2500.0, phi_s: 0.6, phi_int: 0.6, delta0: 0.5 };
    let mut worst_tau: f64 = 0.0;
    for _ in 0..1000 {
        let d = SymTensor2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let pr = 10f64.powf(rng.random_range(-1.0..4.0));
        let tau = cst::mu_i_stress(pr, &d, i0, mu1, mu2, &mat)?;
        let i = cst::inertial_number(cst::second_invariant(&d), pr, &mat)?;
        let expect = cst::mu_of_i(i, mu1, mu2, i0)? * pr;
        worst_tau = worst_tau.max(((cst::second_invariant(&tau) - expect) / expect).abs());
    }
    if worst_tau > 1e-12 {
        fail(format!("|tau| differs from mu p by {worst_tau:e}"));
    }

    // Active never exceeds passive.
    for _ in 0..1000 {
        let phi = rng.random_range(0.0..deg(89.0));
        let delta0 = rng.random_range(0.0..=phi);
        let m = MaterialParams { d: 1e-3, rho_star: 2500.0, phi_s: 0.6, phi_int: phi, delta0 };
        for conv in [KConvention::Printed, KConvention::Sqrt] {
            let ka = cst::earth_pressure_k(PressureState::Active, &m, conv)?;
            let kp = cst::earth_pressure_k(PressureState::Passive, &m, conv)?;
            if ka > kp {
                fail(format!("K_act {ka} > K_pas {kp} at phi = {phi}, delta0 = {delta0}"));
            }
        }
    }

    let passed = failures.is_empty();
    let detail = if passed {
        format!("Bagnold identity within {worst_jop:e}, |tau| within {worst_tau:e}")
    } else {
        failures.join("; ")
    };
    Ok(Check::new(passed, detail))
}

/// Implicit viscous steps on a periodic sine: decay, conservation and
/// agreement with a fine explicit reference.
fn viscous_operator() -> CheckResult {
    let n = 64;
    let grid = Grid1D::uniform(n, 0.0, 1.0)?;
    let h0: f64 = 0.01;
    // Diffusivity nu sqrt(h) = 1 / (4 pi^2): the sine mode decays like exp(-t).
    let nu = 1.0 / (4.0 * std::f64::consts::PI.powi(2) * h0.sqrt());
    let cfg = mui_config(deg(26.0), ViscosityPolicy::Constant(nu));
    let h = vec![h0; n];
    let hu: Vec<f64> = grid.x.iter().map(|&x| h0 * (0.2 + 0.1 * (2.0 * std::f64::consts::PI * x).sin())).collect();
    let mut s = SimState::new(0.0, h.clone(), hu.clone());
    let p0 = s.momentum(grid.dx);
    let amplitude = |s: &SimState| {
        let u: Vec<f64> = s.h.iter().zip(&s.hu).map(|(h, m)| m / h).collect();
        let hi = u.iter().copied().fold(f64::MIN, f64::max);
        let lo = u.iter().copied().fold(f64::MAX, f64::min);
        0.5 * (hi - lo)
    };
    let (duration, n_steps) = (0.5, 50_000);
    let dt = duration / n_steps as f64;
    let mut amp = amplitude(&s);
    let mut decreasing = true;
    let mut drift: f64 = 0.0;
    for _ in 0..n_steps {
        s = solver::viscous_solve(&s, dt, &grid, &cfg, Boundary::Periodic)?;
        let a = amplitude(&s);
        decreasing &= a < amp;
        amp = a;
        drift = drift.max(((s.momentum(grid.dx) - p0) / p0).abs());
    }
    let reference = oracles::explicit_viscous(&h, &hu, nu, grid.dx, duration, 500_000);
    let err = s
        .hu
        .iter()
        .zip(&reference)
        .zip(&h)
        .map(|((a, b), h)| ((a - b) / h).abs())
        .fold(0.0, f64::max);
    Ok(Check::new(
        decreasing && drift < 1e-12 && err < 1e-6,
        format!(
            "amplitude strictly decreasing: {decreasing}, final {amp:.6e}; momentum drift {drift:e}; L-inf velocity error vs explicit {err:e}"
        ),
    ))
}

const DETERMINISM_SCENARIO: &str = "\
name = determinism
model = mu_i
[model]
theta = 25deg
theta1 = 21deg
theta2 = 31deg
beta = 0.136
ell = 0.00065m
viscosity = formula
[material]
delta0 = 23deg
[grid]
n = 4096
x_min = 0m
x_max = 2m
[ic]
profile = gaussian_pile(0.05m, 0.5m, 0.1m)
[solver]
t_end = 0.2s
bc = open
[output]
interval = 0.05s
";

/// Two runs of one scenario, and the serial and parallel paths, write the
/// same bytes.
fn determinism() -> CheckResult {
    let scenario = parse_scenario(DETERMINISM_SCENARIO)?;
    let dir = tempfile::tempdir()?;
    let run = |sub: &str, execution| -> Result<std::path::PathBuf, app::AppError> {
        let mut s = scenario.clone();
        s.solver.execution = execution;
        Ok(app::run_compare(&s, Some(&dir.path().join(sub)))?.compare_csv.parent().unwrap().to_path_buf())
    };
    let a = run("a", crate::Execution::default())?;
    let b = run("b", crate::Execution::default())?;
    let c = run("serial", crate::Execution::Serial)?;
    let repeat = dirs_identical(&a, &b)?;
    let serial = dirs_identical(&a, &c)?;
    let bytes = std::fs::metadata(a.join("mu_i").join(output::FIELDS_FILE))?.len();
    Ok(Check::new(
        repeat.is_none() && serial.is_none(),
        format!(
            "repeat: {}; serial vs parallel: {}; fields.csv {bytes} bytes",
            repeat.as_deref().unwrap_or("identical"),
            serial.as_deref().unwrap_or("identical")
        ),
    ))
}
