//! `run` and `compare` drivers.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::models::{ModelConfig, ModelKind};
use crate::output::{self, Diagnostics, FrameWriter, OutputError};
use crate::scenario::{self, Scenario, ScenarioError};
use crate::solver::{self, Grid1D, SimState, SolverConfig, SolverError};

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("{model}: {source}")]
    Model {
        model: &'static str,
        #[source]
        source: Box<AppError>,
    },
}

impl AppError {
    /// Process exit code: 1 for invalid input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Scenario(_) => 1,
            AppError::Model { source, .. } => source.exit_code(),
            AppError::Solver(_) | AppError::Output(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, AppError>;

/// Frames written by one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub directory: PathBuf,
    pub diagnostics: Vec<Diagnostics>,
    pub final_state: SimState,
}

/// Simulates `initial` under `cfg` and writes the frames to `dir`.
pub fn simulate(
    grid: &Grid1D,
    initial: SimState,
    cfg: &ModelConfig,
    scfg: &SolverConfig,
    interval: Option<f64>,
    dir: &Path,
) -> Result<RunOutput> {
    let mut writer = FrameWriter::create(dir, scfg.h_eps)?;
    let mut diagnostics = Vec::new();
    let final_state = solver::run(grid, initial, cfg, scfg, interval, |state: &SimState, dt| -> Result<()> {
        let d = output::compute_diagnostics(state, grid, scfg.h_eps, dt);
        writer.write_frame(state, &d, grid)?;
        diagnostics.push(d);
        Ok(())
    })?;
    writer.finish()?;
    Ok(RunOutput { directory: dir.to_path_buf(), diagnostics, final_state })
}

/// Runs a scenario under its own model. `out` overrides the scenario's
/// output directory.
pub fn run_scenario(scenario: &Scenario, out: Option<&Path>) -> Result<RunOutput> {
    let dir = out.unwrap_or(&scenario.output.directory);
    let (grid, initial) = scenario::build_initial_state(scenario)?;
    simulate(&grid, initial, &scenario.model, &scenario.solver, scenario.output.interval, dir)
}

/// Outputs of [`run_compare`].
#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub savage_hutter: RunOutput,
    pub mu_i: RunOutput,
    pub compare_csv: PathBuf,
}

/// Runs the scenario under both models into `<out>/savage_hutter` and
/// `<out>/mu_i`, then writes `<out>/compare.csv`.
pub fn run_compare(scenario: &Scenario, out: Option<&Path>) -> Result<CompareOutput> {
    let dir = out.unwrap_or(&scenario.output.directory);
    let sh_cfg = scenario.model_config(ModelKind::SavageHutter)?;
    let mui_cfg = scenario.model_config(ModelKind::MuI)?;
    let (grid, initial) = scenario::build_initial_state(scenario)?;
    let scfg = &scenario.solver;
    let interval = scenario.output.interval;

    let one = |cfg: &ModelConfig| {
        let label = cfg.kind().label();
        simulate(&grid, initial.clone(), cfg, scfg, interval, &dir.join(label))
            .map_err(|e| AppError::Model { model: label, source: Box::new(e) })
    };
    let (sh, mui) = scfg.execution.join(|| one(&sh_cfg), || one(&mui_cfg));
    let (sh, mui) = (sh?, mui?);
    let compare_csv = dir.join(output::COMPARE_FILE);
    output::write_compare(&compare_csv, &sh.diagnostics, &mui.diagnostics)?;
    Ok(CompareOutput { savage_hutter: sh, mu_i: mui, compare_csv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    const COINCIDENT: &str = "\
model = savage_hutter
[model]
theta = 20deg
theta1 = 25deg
theta2 = 25deg
beta = 0.136
ell = 0.001
[material]
delta0 = 25deg
[grid]
n = 50
x_min = 0
x_max = 1
[ic]
profile = dam_break(0.1, 0, 0.5)
[solver]
t_end = 0.2
bc = reflective
[output]
interval = 0.05
";

    #[test]
    fn coincident_models_write_identical_files() {
        let dir = tempfile::tempdir().unwrap();
        let s = parse_scenario(COINCIDENT).unwrap();
        let out = run_compare(&s, Some(dir.path())).unwrap();
        for file in [output::FIELDS_FILE, output::DIAGNOSTICS_FILE] {
            let a = std::fs::read(out.savage_hutter.directory.join(file)).unwrap();
            let b = std::fs::read(out.mu_i.directory.join(file)).unwrap();
            assert_eq!(a, b, "{file}");
        }
        assert_eq!(out.savage_hutter.diagnostics.len(), 5);
    }

    #[test]
    fn zero_end_time_writes_initial_frame() {
        let dir = tempfile::tempdir().unwrap();
        let s = parse_scenario(&COINCIDENT.replace("t_end = 0.2", "t_end = 0")).unwrap();
        let out = run_compare(&s, Some(dir.path())).unwrap();
        assert_eq!(out.savage_hutter.diagnostics.len(), 1);
        assert_eq!(out.mu_i.final_state.h, out.savage_hutter.final_state.h);
        let csv = std::fs::read_to_string(&out.compare_csv).unwrap();
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn missing_flow_rule_is_a_validation_error() {
        let text: String = COINCIDENT.lines().filter(|l| !l.starts_with("theta1")).collect::<Vec<_>>().join("\n");
        let err = parse_scenario(&text).map(|s| run_compare(&s, None)).unwrap_err();
        assert_eq!(AppError::from(err).exit_code(), 1);
    }

    #[test]
    fn solver_failures_are_runtime_errors() {
        let e = AppError::Model {
            model: "mu_i",
            source: Box::new(AppError::Solver(SolverError::InvalidState("x".into()))),
        };
        assert_eq!(e.exit_code(), 2);
    }
}
