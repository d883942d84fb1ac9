//! First-order well-balanced finite-volume solver on a uniform 1D grid.
//!
//! One step is split as
//!
//! 1. convective update with hydrostatic reconstruction and the Rusanov
//!    flux (this also carries the bed-slope source),
//! 2. gravity along the incline, `g h sin(theta)`,
//! 3. Coulomb friction projection (arrests a cell whose friction impulse
//!    exceeds its momentum),
//! 4. backward-Euler viscous solve for the mu(I) model.
//!
//! Motionless cells whose net static force stays below the yield threshold
//! are held. An interface between two held (or dry) cells exchanges no
//! mass and acts as a wall for each side, and a held cell with only such
//! interfaces is carried over bit-for-bit.

use thiserror::Error;

use crate::exec::Execution;
use crate::models::{self, FluxVector, ModelConfig, ModelError};
use crate::tridiag::{self, TridiagError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("non-finite {field} in cell {cell} at t = {t} s")]
    NonFiniteState { t: f64, cell: usize, field: &'static str },
    #[error("viscous solve failed: {0}")]
    Viscous(#[from] TridiagError),
    #[error("step from t = {t} s failed: {source}")]
    Step {
        t: f64,
        #[source]
        source: Box<SolverError>,
    },
}

pub type Result<T> = std::result::Result<T, SolverError>;

/// Uniform grid of `n` cells. `b` is the bed elevation normal to the
/// reference incline, one value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub n: usize,
    pub dx: f64,
    pub x: Vec<f64>,
    pub b: Vec<f64>,
}

impl Grid1D {
    /// Flat-bed grid on `[x_min, x_max]`.
    pub fn uniform(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n < 2 {
            return Err(SolverError::InvalidGrid(format!("need at least 2 cells, got {n}")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(SolverError::InvalidGrid(format!("bad extent [{x_min}, {x_max}]")));
        }
        let dx = (x_max - x_min) / n as f64;
        let x = (0..n).map(|i| x_min + (i as f64 + 0.5) * dx).collect();
        Ok(Self { n, dx, x, b: vec![0.0; n] })
    }

    pub fn with_bed(mut self, bed: impl Fn(f64) -> f64) -> Result<Self> {
        let b: Vec<f64> = self.x.iter().map(|&x| bed(x)).collect();
        if let Some(i) = b.iter().position(|v| !v.is_finite()) {
            return Err(SolverError::InvalidGrid(format!("bed elevation not finite at cell {i}")));
        }
        self.b = b;
        Ok(self)
    }

    pub fn x_min(&self) -> f64 {
        self.x[0] - 0.5 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.n - 1] + 0.5 * self.dx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub h: Vec<f64>,
    pub hu: Vec<f64>,
}

impl SimState {
    pub fn new(t: f64, h: Vec<f64>, hu: Vec<f64>) -> Self {
        Self { t, h, hu }
    }

    pub fn at_rest(h: Vec<f64>) -> Self {
        let hu = vec![0.0; h.len()];
        Self { t: 0.0, h, hu }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// `sum h dx`, summed left to right.
    pub fn mass(&self, dx: f64) -> f64 {
        self.h.iter().fold(0.0, |acc, h| acc + h * dx)
    }

    pub fn momentum(&self, dx: f64) -> f64 {
        self.hu.iter().fold(0.0, |acc, q| acc + q * dx)
    }

    pub fn check(&self, grid: &Grid1D, h_eps: f64) -> Result<()> {
        if self.h.len() != grid.n || self.hu.len() != grid.n {
            return Err(SolverError::InvalidState(format!(
                "state has {}/{} cells, grid has {}",
                self.h.len(),
                self.hu.len(),
                grid.n
            )));
        }
        self.check_finite()?;
        for (i, (&h, &hu)) in self.h.iter().zip(&self.hu).enumerate() {
            if h < 0.0 {
                return Err(SolverError::InvalidState(format!("negative depth {h} in cell {i}")));
            }
            if h < h_eps && hu != 0.0 {
                return Err(SolverError::InvalidState(format!("dry cell {i} carries momentum {hu}")));
            }
        }
        Ok(())
    }

    fn check_finite(&self) -> Result<()> {
        for (field, values) in [("h", &self.h), ("hu", &self.hu)] {
            if let Some(cell) = values.iter().position(|v| !v.is_finite()) {
                return Err(SolverError::NonFiniteState { t: self.t, cell, field });
            }
        }
        if !self.t.is_finite() {
            return Err(SolverError::NonFiniteState { t: self.t, cell: 0, field: "t" });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Mirrored depth, negated momentum.
    Reflective,
    /// Zero-order extrapolation.
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViscousScheme {
    Implicit,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub cfl: f64,
    pub h_eps: f64,
    /// Step used when every cell is dry, and upper bound on any step (s).
    pub dt_max: f64,
    pub t_end: f64,
    pub bc: Boundary,
    pub viscous_scheme: ViscousScheme,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.9,
            h_eps: models::DEFAULT_DRY_DEPTH,
            dt_max: 0.01,
            t_end: 1.0,
            bc: Boundary::Open,
            viscous_scheme: ViscousScheme::Implicit,
            execution: Execution::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(SolverError::InvalidConfig(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.h_eps > 0.0 && self.h_eps.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("h_eps must be positive, got {}", self.h_eps)));
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("dt_max must be positive, got {}", self.dt_max)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Conserved {
    pub h: f64,
    pub hu: f64,
}

impl Conserved {
    pub fn new(h: f64, hu: f64) -> Self {
        Self { h, hu }
    }
}

/// Hydrostatic reconstruction at an interface: both depths are measured
/// against `max(b_L, b_R)` and clipped at zero. A side already at the
/// higher bed keeps its depth unchanged.
pub fn hydrostatic_reconstruct(h_l: f64, b_l: f64, h_r: f64, b_r: f64) -> (f64, f64) {
    let b_star = b_l.max(b_r);
    let side = |h: f64, b: f64| if b == b_star { h } else { (h + b - b_star).max(0.0) };
    (side(h_l, b_l), side(h_r, b_r))
}

/// Rusanov flux with per-side earth-pressure coefficients.
pub fn rusanov_flux_k(left: Conserved, k_l: f64, right: Conserved, k_r: f64, cfg: &ModelConfig) -> FluxVector {
    let fl = models::flux(left.h, left.hu, k_l, cfg);
    let fr = models::flux(right.h, right.hu, k_r, cfg);
    let (l0, l1) = models::wave_speeds(left.h, left.hu, k_l, cfg);
    let (r0, r1) = models::wave_speeds(right.h, right.hu, k_r, cfg);
    let a = l0.abs().max(l1.abs()).max(r0.abs()).max(r1.abs());
    FluxVector {
        f_h: 0.5 * (fl.f_h + fr.f_h) - 0.5 * a * (right.h - left.h),
        f_hu: 0.5 * (fl.f_hu + fr.f_hu) - 0.5 * a * (right.hu - left.hu),
    }
}

/// Rusanov flux with the flow-independent `K` (1 for mu(I)).
pub fn rusanov_flux(left: Conserved, right: Conserved, cfg: &ModelConfig) -> FluxVector {
    let k = cfg.earth_pressure(0.0).unwrap_or(1.0);
    rusanov_flux_k(left, k, right, k, cfg)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    h: f64,
    hu: f64,
    u: f64,
    b: f64,
    k: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct InterfaceFlux {
    mass: f64,
    /// Momentum flux seen by the cell on the left.
    mom_left: f64,
    /// Momentum flux seen by the cell on the right.
    mom_right: f64,
}

/// Index of the cell that supplies the value at position `i`, which may be
/// one past either end, and whether it is mirrored.
fn resolve(i: isize, n: usize, bc: Boundary) -> (usize, bool) {
    if i < 0 {
        match bc {
            Boundary::Periodic => (n - 1, false),
            Boundary::Reflective => (0, true),
            Boundary::Open => (0, false),
        }
    } else if i as usize >= n {
        match bc {
            Boundary::Periodic => (0, false),
            Boundary::Reflective => (n - 1, true),
            Boundary::Open => (n - 1, false),
        }
    } else {
        (i as usize, false)
    }
}

struct Frame<'a> {
    cells: Vec<Cell>,
    bc: Boundary,
    cfg: &'a ModelConfig,
}

impl Frame<'_> {
    fn cell(&self, i: isize) -> Cell {
        let (j, mirror) = resolve(i, self.cells.len(), self.bc);
        let c = self.cells[j];
        if mirror {
            Cell { hu: -c.hu, u: -c.u, ..c }
        } else {
            c
        }
    }

    fn interface(&self, j: usize, static_only: bool) -> InterfaceFlux {
        let l = self.cell(j as isize - 1);
        let r = self.cell(j as isize);
        let (hl, hr) = hydrostatic_reconstruct(l.h, l.b, r.h, r.b);
        let moment = |c: &Cell, hs: f64| {
            if static_only {
                0.0
            } else if hs == c.h {
                c.hu
            } else {
                hs * c.u
            }
        };
        let f = rusanov_flux_k(
            Conserved::new(hl, moment(&l, hl)),
            l.k,
            Conserved::new(hr, moment(&r, hr)),
            r.k,
            self.cfg,
        );
        InterfaceFlux {
            mass: f.f_h,
            mom_left: f.f_hu + models::pressure(l.h, l.k, self.cfg) - models::pressure(hl, l.k, self.cfg),
            mom_right: f.f_hu + models::pressure(r.h, r.k, self.cfg) - models::pressure(hr, r.k, self.cfg),
        }
    }

    fn wall(&self, j: usize) -> InterfaceFlux {
        let l = self.cell(j as isize - 1);
        let r = self.cell(j as isize);
        InterfaceFlux {
            mass: 0.0,
            mom_left: models::pressure(l.h, l.k, self.cfg),
            mom_right: models::pressure(r.h, r.k, self.cfg),
        }
    }
}

fn build_frame<'a>(state: &SimState, grid: &Grid1D, cfg: &'a ModelConfig, bc: Boundary) -> Result<Frame<'a>> {
    let n = grid.n;
    let u: Vec<f64> = (0..n).map(|i| models::velocity(state.h[i], state.hu[i], cfg)).collect();
    let mut cells: Vec<Cell> = (0..n)
        .map(|i| Cell { h: state.h[i], hu: state.hu[i], u: u[i], b: grid.b[i], k: 1.0 })
        .collect();
    if cfg.has_constant_k() {
        let k = cfg.earth_pressure(0.0)?;
        cells.iter_mut().for_each(|c| c.k = k);
    } else {
        let vel = |i: isize| {
            let (j, mirror) = resolve(i, n, bc);
            if mirror {
                -u[j]
            } else {
                u[j]
            }
        };
        for i in 0..n {
            let dudx = (vel(i as isize + 1) - vel(i as isize - 1)) / (2.0 * grid.dx);
            cells[i].k = cfg.earth_pressure(dudx)?;
        }
    }
    Ok(Frame { cells, bc, cfg })
}

/// Stable time step: `cfl dx / max |wave speed|`, bounded by `dt_max` and
/// by the time left until `t_end`. An all-dry domain gets `dt_max`.
pub fn cfl_dt(state: &SimState, grid: &Grid1D, cfg: &ModelConfig, scfg: &SolverConfig) -> Result<f64> {
    let frame = build_frame(state, grid, cfg, scfg.bc)?;
    Ok(cfl_dt_frame(&frame, state.t, grid, scfg, scfg.t_end))
}

fn cfl_dt_frame(frame: &Frame, t: f64, grid: &Grid1D, scfg: &SolverConfig, t_target: f64) -> f64 {
    let smax = scfg
        .execution
        .max_by(frame.cells.len(), |i| {
            let c = &frame.cells[i];
            let (lo, hi) = models::wave_speeds(c.h, c.hu, c.k, frame.cfg);
            lo.abs().max(hi.abs())
        })
        .unwrap_or(0.0);
    let dt = if smax > 0.0 { (scfg.cfl * grid.dx / smax).min(scfg.dt_max) } else { scfg.dt_max };
    dt.min(t_target - t)
}

/// Operator-split Coulomb friction. Each cell loses at most the impulse
/// `dt g h cos(theta) mu_b`; a cell whose momentum is smaller stops.
pub fn coulomb_projection(state: &SimState, dt: f64, cfg: &ModelConfig) -> SimState {
    let hu = state
        .h
        .iter()
        .zip(&state.hu)
        .map(|(&h, &hu)| project_cell(h, hu, dt, cfg))
        .collect();
    SimState { t: state.t, h: state.h.clone(), hu }
}

fn project_cell(h: f64, hu: f64, dt: f64, cfg: &ModelConfig) -> f64 {
    project_with(h, hu, dt, models::dynamic_friction(h, hu, cfg), cfg)
}

fn project_with(h: f64, hu: f64, dt: f64, mu: f64, cfg: &ModelConfig) -> f64 {
    if hu == 0.0 {
        return 0.0;
    }
    let impulse = dt * cfg.g * h * cfg.cos_theta() * mu;
    if hu.abs() <= impulse {
        0.0
    } else {
        hu - impulse * hu.signum()
    }
}

/// Backward-Euler solve of `d(hu)/dt = d/dx(nu h^{3/2} du/dx)` with `h`
/// frozen. Interface diffusivity is `nu ((h_i + h_{i+1}) / 2)^{3/2}`;
/// interfaces touching a dry cell, and domain ends unless periodic, carry
/// none.
pub fn viscous_solve(
    state: &SimState,
    dt: f64,
    grid: &Grid1D,
    cfg: &ModelConfig,
    bc: Boundary,
) -> Result<SimState> {
    let nu = match cfg.viscosity()? {
        Some(nu) if nu > 0.0 => nu,
        _ => return Ok(state.clone()),
    };
    let n = grid.n;
    let wet: Vec<bool> = state.h.iter().map(|&h| !models::is_dry(h, cfg)).collect();
    // diff[j] couples cells j and j+1 (j = n-1 wraps when periodic).
    let diff: Vec<f64> = (0..n)
        .map(|j| {
            let k = if j + 1 < n {
                j + 1
            } else if bc == Boundary::Periodic {
                0
            } else {
                return 0.0;
            };
            if wet[j] && wet[k] {
                nu * (0.5 * (state.h[j] + state.h[k])).powf(1.5)
            } else {
                0.0
            }
        })
        .collect();
    let r = dt / (grid.dx * grid.dx);
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        if !wet[i] {
            diag[i] = 1.0;
            continue;
        }
        let d_left = diff[(i + n - 1) % n];
        let d_right = diff[i];
        lower[i] = -r * d_left;
        upper[i] = -r * d_right;
        diag[i] = state.h[i] + r * (d_left + d_right);
        rhs[i] = state.hu[i];
    }
    let u = if bc == Boundary::Periodic {
        tridiag::solve_cyclic(&lower, &diag, &upper, &rhs)?
    } else {
        lower[0] = 0.0;
        upper[n - 1] = 0.0;
        tridiag::solve(&lower, &diag, &upper, &rhs)?
    };
    // Update through interface fluxes rather than h * u so that momentum is
    // conserved to rounding whatever the residual of the solve.
    let flux: Vec<f64> = (0..n).map(|j| if diff[j] == 0.0 { 0.0 } else { r * diff[j] * (u[(j + 1) % n] - u[j]) }).collect();
    let hu = (0..n)
        .map(|i| if wet[i] { state.hu[i] + (flux[i] - flux[(i + n - 1) % n]) } else { 0.0 })
        .collect();
    Ok(SimState { t: state.t, h: state.h.clone(), hu })
}

/// Advances by one CFL step, never past `scfg.t_end`. Returns the new
/// state and the step taken; a state already at `t_end` is returned as is
/// with `dt = 0`.
pub fn step(state: &SimState, grid: &Grid1D, cfg: &ModelConfig, scfg: &SolverConfig) -> Result<(SimState, f64)> {
    step_until(state, grid, cfg, scfg, scfg.t_end)
}

/// Like [`step`] but stops at `t_target` (which must not exceed `t_end`).
/// Landing on the target sets the clock to it exactly.
pub fn step_until(
    state: &SimState,
    grid: &Grid1D,
    cfg: &ModelConfig,
    scfg: &SolverConfig,
    t_target: f64,
) -> Result<(SimState, f64)> {
    let t_target = t_target.min(scfg.t_end);
    if state.t >= t_target {
        return Ok((state.clone(), 0.0));
    }
    let n = grid.n;
    let exec = scfg.execution;
    let frame = build_frame(state, grid, cfg, scfg.bc)?;
    let dt = cfl_dt_frame(&frame, state.t, grid, scfg, t_target);

    // Which motionless cells does friction hold? Only interfaces next to a
    // wet cell at rest need the static pressure balance.
    let at_rest = |i: usize| {
        let c = &frame.cells[i];
        c.hu == 0.0 && !models::is_dry(c.h, cfg)
    };
    let static_flux = exec.map(n + 1, |j| {
        let touches = (j > 0 && at_rest(j - 1)) || (j < n && at_rest(j));
        touches.then(|| frame.interface(j, true))
    });
    let quiet: Vec<bool> = (0..n)
        .map(|i| {
            let c = &frame.cells[i];
            if models::is_dry(c.h, cfg) {
                return true;
            }
            if c.hu != 0.0 {
                return false;
            }
            let (Some(right), Some(left)) = (static_flux[i + 1], static_flux[i]) else {
                return false;
            };
            let force = -(right.mom_left - left.mom_right) / grid.dx + models::driving_force(c.h, 0.0, cfg);
            models::holds(c.h, force, cfg)
        })
        .collect();
    let quiet_at = |i: isize| quiet[resolve(i, n, scfg.bc).0];

    let flux = exec.map(n + 1, |j| {
        if quiet_at(j as isize - 1) && quiet_at(j as isize) {
            frame.wall(j)
        } else {
            frame.interface(j, false)
        }
    });

    let lam = dt / grid.dx;
    let updated = exec.map(n, |i| {
        let c = &frame.cells[i];
        let ii = i as isize;
        if quiet[i] && quiet_at(ii - 1) && quiet_at(ii + 1) {
            return (c.h, c.hu);
        }
        let h = (c.h - lam * (flux[i + 1].mass - flux[i].mass)).max(0.0);
        let mut hu = c.hu - lam * (flux[i + 1].mom_left - flux[i].mom_right);
        // Friction is evaluated before the gravity impulse so that steady
        // uniform flow is an exact fixed point of the split step.
        let mu = models::dynamic_friction(h, hu, cfg);
        hu += dt * models::driving_force(h, 0.0, cfg);
        hu = project_with(h, hu, dt, mu, cfg);
        if models::is_dry(h, cfg) {
            hu = 0.0;
        }
        (h, hu)
    });
    let (h, hu): (Vec<f64>, Vec<f64>) = updated.into_iter().unzip();
    let t = if dt >= t_target - state.t { t_target } else { state.t + dt };
    let mut next = SimState { t, h, hu };

    if scfg.viscous_scheme == ViscousScheme::Implicit {
        next = viscous_solve(&next, dt, grid, cfg, scfg.bc)?;
    }
    next.check_finite()?;
    Ok((next, dt))
}

/// Runs from `initial` to `scfg.t_end`, calling `on_frame(state, dt)` for
/// the initial state, at every multiple of `frame_interval` and at the end.
/// Returns the final state.
pub fn run<E, F>(
    grid: &Grid1D,
    initial: SimState,
    cfg: &ModelConfig,
    scfg: &SolverConfig,
    frame_interval: Option<f64>,
    mut on_frame: F,
) -> std::result::Result<SimState, E>
where
    E: From<SolverError>,
    F: FnMut(&SimState, f64) -> std::result::Result<(), E>,
{
    scfg.validate()?;
    cfg.validate().map_err(SolverError::from)?;
    initial.check(grid, scfg.h_eps)?;
    if scfg.viscous_scheme == ViscousScheme::Implicit {
        cfg.viscosity().map_err(SolverError::from)?;
    }
    let interval = frame_interval.filter(|iv| *iv > 0.0 && iv.is_finite());
    let mut state = initial;
    on_frame(&state, 0.0)?;
    let t0 = state.t;
    let mut frame = 1u64;
    while state.t < scfg.t_end {
        let target = interval
            .map(|iv| t0 + frame as f64 * iv)
            .filter(|&tf| tf < scfg.t_end)
            .unwrap_or(scfg.t_end);
        let (next, dt) = step_until(&state, grid, cfg, scfg, target)
            .map_err(|e| SolverError::Step { t: state.t, source: Box::new(e) })?;
        state = next;
        if state.t >= target {
            on_frame(&state, dt)?;
            frame += 1;
        }
    }
    Ok(state)
}
