//! Scenario files.
//!
//! A scenario is UTF-8 text made of `key = value` lines, `#` comments and
//! the sections `[model]`, `[material]`, `[grid]`, `[ic]`, `[solver]` and
//! `[output]`. Keys before the first section are top-level (`name`,
//! `model`). Angles must carry a `deg` or `rad` suffix; lengths may carry
//! `m`, times `s`.
//!
//! ```text
//! name = dam_break
//! model = savage_hutter
//!
//! [material]
//! delta0 = 30deg
//!
//! [grid]
//! n = 100
//! x_min = 0m
//! x_max = 1m
//!
//! [ic]
//! profile = dam_break(1m, 0m, 0.5m)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::constitutive::{KConvention, MaterialParams, PouliquenParams};
use crate::models::{self, KPolicy, ModelConfig, ModelKind, ViscosityPolicy};
use crate::solver::{Boundary, Grid1D, SimState, SolverConfig, SolverError, ViscousScheme};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("line {line}: bad value for `{key}`: {reason}")]
    BadValue { key: String, line: usize, reason: String },
    #[error("line {line}: inconsistent model at `{key}`: {reason}")]
    InconsistentModel { key: String, line: usize, reason: String },
    #[error("line {line}: cannot read `{path}`: {reason}")]
    File { path: PathBuf, line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, ScenarioError>;

#[derive(Debug, Clone, PartialEq)]
pub enum Topography {
    Flat,
    /// Bed `b0` for `x >= x0`, zero upstream.
    Step { b0: f64, x0: f64 },
    /// Piecewise-linear bed through `(x, b)` points, constant beyond the ends.
    Table { path: PathBuf, points: Vec<(f64, f64)> },
}

impl Topography {
    pub fn elevation(&self, x: f64) -> f64 {
        match self {
            Topography::Flat => 0.0,
            Topography::Step { b0, x0 } => {
                if x >= *x0 {
                    *b0
                } else {
                    0.0
                }
            }
            Topography::Table { points, .. } => interpolate(points, x),
        }
    }
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let first = points[0];
    let last = points[points.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let k = points.partition_point(|p| p.0 <= x);
    let (x0, b0) = points[k - 1];
    let (x1, b1) = points[k];
    b0 + (b1 - b0) * (x - x0) / (x1 - x0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    DamBreak { h_left: f64, h_right: f64, x0: f64 },
    Uniform { h0: f64, u0: f64 },
    GaussianPile { h0: f64, x0: f64, width: f64 },
    /// Flat free surface at elevation `eta`.
    LakeAtRest { eta: f64 },
    /// Uniform depth moving at the steady-flow Froude number (mu(I) only).
    SteadyUniform { h0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub directory: PathBuf,
    /// Time between frames; `None` writes only the first and last frame.
    pub interval: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    /// The configuration of the selected model.
    pub model: ModelConfig,
    pub material: MaterialParams,
    pub pouliquen: Option<PouliquenParams>,
    pub k_policy: KPolicy,
    pub chi: f64,
    pub viscosity: ViscosityPolicy,
    pub grid: GridSpec,
    pub topography: Topography,
    pub ic: InitialCondition,
    /// Velocity imposed on every wet cell, overriding the profile's own.
    pub ic_velocity: Option<f64>,
    pub solver: SolverConfig,
    pub output: OutputSpec,
    model_line: usize,
}

impl Scenario {
    /// Configuration for either model built from this scenario's parameters.
    pub fn model_config(&self, kind: ModelKind) -> Result<ModelConfig> {
        let base = self.model;
        let cfg = match kind {
            ModelKind::SavageHutter => base.with_model(models::Model::SavageHutter(models::SavageHutterParams {
                material: self.material,
                k: self.k_policy,
            })),
            ModelKind::MuI => {
                let pouliquen = self.pouliquen.ok_or_else(|| ScenarioError::InconsistentModel {
                    key: "model".into(),
                    line: self.model_line,
                    reason: "the mu(I) model needs theta1, theta2, beta and ell in [model]".into(),
                })?;
                base.with_model(models::Model::MuI(models::MuIParams {
                    chi: self.chi,
                    pouliquen,
                    viscosity: self.viscosity,
                }))
            }
        };
        cfg.validate().map_err(|e| ScenarioError::InconsistentModel {
            key: "model".into(),
            line: self.model_line,
            reason: e.to_string(),
        })?;
        Ok(cfg)
    }
}

/// Parses a scenario whose relative file references resolve against the
/// current directory.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    parse_scenario_in(text, Path::new("."))
}

/// Reads and parses a scenario file; relative paths inside it resolve
/// against the file's directory.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::File {
        path: path.to_path_buf(),
        line: 0,
        reason: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_scenario_in(&text, base)
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

const SECTIONS: [&str; 6] = ["model", "material", "grid", "ic", "solver", "output"];

struct Document {
    entries: BTreeMap<String, Entry>,
    used: BTreeSet<String>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').map(str::trim).ok_or_else(|| ScenarioError::BadValue {
                    key: content.into(),
                    line,
                    reason: "unterminated section header".into(),
                })?;
                if !SECTIONS.contains(&name) {
                    return Err(ScenarioError::BadValue {
                        key: name.into(),
                        line,
                        reason: format!("unknown section; expected one of {}", SECTIONS.join(", ")),
                    });
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ScenarioError::BadValue {
                key: content.into(),
                line,
                reason: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
            if key.is_empty() {
                return Err(ScenarioError::BadValue { key: full, line, reason: "empty key".into() });
            }
            if let Some(prev) = entries.get(&full) {
                let prev: &Entry = prev;
                return Err(ScenarioError::BadValue {
                    key: full,
                    line,
                    reason: format!("duplicate key, first set on line {}", prev.line),
                });
            }
            entries.insert(full, Entry { value: value.trim().to_string(), line });
        }
        Ok(Self { entries, used: BTreeSet::new() })
    }

    fn get(&mut self, key: &str) -> Option<Entry> {
        let e = self.entries.get(key).cloned();
        if e.is_some() {
            self.used.insert(key.to_string());
        }
        e
    }

    fn require(&mut self, key: &str) -> Result<Entry> {
        self.get(key).ok_or_else(|| ScenarioError::MissingKey(key.to_string()))
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }

    fn reject_unknown(&self) -> Result<()> {
        match self.entries.iter().find(|(k, _)| !self.used.contains(*k)) {
            Some((k, e)) => Err(ScenarioError::BadValue { key: k.clone(), line: e.line, reason: "unknown key".into() }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Angle,
    Length,
    Time,
    Plain,
}

fn bad(key: &str, line: usize, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::BadValue { key: key.into(), line, reason: reason.into() }
}

fn quantity(raw: &str, unit: Unit, key: &str, line: usize) -> Result<f64> {
    let raw = raw.trim();
    let (number, scale) = match unit {
        Unit::Angle => {
            if let Some(v) = raw.strip_suffix("deg") {
                (v, std::f64::consts::PI / 180.0)
            } else if let Some(v) = raw.strip_suffix("rad") {
                (v, 1.0)
            } else {
                return Err(bad(key, line, format!("angle `{raw}` needs a `deg` or `rad` suffix")));
            }
        }
        Unit::Length => (raw.strip_suffix('m').unwrap_or(raw), 1.0),
        Unit::Time => (raw.strip_suffix('s').unwrap_or(raw), 1.0),
        Unit::Plain => (raw, 1.0),
    };
    let v: f64 = number
        .trim()
        .parse()
        .map_err(|_| bad(key, line, format!("`{raw}` is not a number")))?;
    if !v.is_finite() {
        return Err(bad(key, line, format!("`{raw}` is not finite")));
    }
    if unit == Unit::Angle {
        Ok(v * scale)
    } else {
        Ok(v)
    }
}

/// Splits `name(a, b, c)` into the name and its arguments.
fn call(raw: &str) -> Option<(&str, Vec<&str>)> {
    let raw = raw.trim();
    let open = raw.find('(')?;
    let inner = raw.strip_suffix(')')?.get(open + 1..)?;
    let args = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').map(str::trim).collect() };
    Some((raw[..open].trim(), args))
}

fn args_of<const N: usize>(
    args: &[&str],
    units: [Unit; N],
    key: &str,
    line: usize,
    form: &str,
) -> Result<[f64; N]> {
    if args.len() != N {
        return Err(bad(key, line, format!("expected {form}")));
    }
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = quantity(args[i], units[i], key, line)?;
    }
    Ok(out)
}

struct Reader<'a> {
    doc: &'a mut Document,
}

impl Reader<'_> {
    fn opt(&mut self, key: &str, unit: Unit) -> Result<Option<f64>> {
        match self.doc.get(key) {
            Some(e) => quantity(&e.value, unit, key, e.line).map(Some),
            None => Ok(None),
        }
    }

    fn or(&mut self, key: &str, unit: Unit, default: f64) -> Result<f64> {
        Ok(self.opt(key, unit)?.unwrap_or(default))
    }

    fn req(&mut self, key: &str, unit: Unit) -> Result<f64> {
        let e = self.doc.require(key)?;
        quantity(&e.value, unit, key, e.line)
    }

    fn check(&self, key: &str, ok: bool, reason: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(bad(key, self.doc.line_of(key), reason))
        }
    }
}

pub fn parse_scenario_in(text: &str, base_dir: &Path) -> Result<Scenario> {
    let mut doc = Document::parse(text)?;
    let name = doc.get("name").map_or_else(|| "scenario".to_string(), |e| e.value);
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(bad("name", doc.line_of("name"), "name must be non-empty and contain no path separators"));
    }
    let model_entry = doc.require("model")?;
    let kind = match model_entry.value.as_str() {
        "savage_hutter" => ModelKind::SavageHutter,
        "mu_i" => ModelKind::MuI,
        other => {
            return Err(bad("model", model_entry.line, format!("`{other}` is not `savage_hutter` or `mu_i`")))
        }
    };
    let mut r = Reader { doc: &mut doc };

    // [model]
    let theta = r.or("model.theta", Unit::Angle, 0.0)?;
    let g = r.or("model.g", Unit::Plain, models::DEFAULT_GRAVITY)?;
    r.check("model.g", g > 0.0, "gravity must be positive")?;
    r.check(
        "model.theta",
        (0.0..std::f64::consts::FRAC_PI_2).contains(&theta),
        "incline angle must lie in [0deg, 90deg)",
    )?;
    let k_policy = match r.doc.get("model.k") {
        None => KPolicy::Constant(1.0),
        Some(e) if e.value == "active_passive" => KPolicy::ActivePassive(KConvention::Printed),
        Some(e) => {
            let k = quantity(&e.value, Unit::Plain, "model.k", e.line)?;
            if k <= 0.0 {
                return Err(bad("model.k", e.line, "K must be positive"));
            }
            KPolicy::Constant(k)
        }
    };
    let k_policy = match r.doc.get("model.k_convention") {
        None => k_policy,
        Some(e) => {
            let conv = match e.value.as_str() {
                "printed" => KConvention::Printed,
                "sqrt" => KConvention::Sqrt,
                other => return Err(bad("model.k_convention", e.line, format!("`{other}` is not `printed` or `sqrt`"))),
            };
            match k_policy {
                KPolicy::ActivePassive(_) => KPolicy::ActivePassive(conv),
                KPolicy::Constant(_) => {
                    return Err(bad("model.k_convention", e.line, "only meaningful with k = active_passive"))
                }
            }
        }
    };
    let chi = r.or("model.chi", Unit::Plain, 1.0)?;
    r.check("model.chi", chi >= 1.0, "shape factor must be >= 1")?;
    let viscosity = match r.doc.get("model.viscosity") {
        None => ViscosityPolicy::Off,
        Some(e) => match e.value.as_str() {
            "off" => ViscosityPolicy::Off,
            "formula" => ViscosityPolicy::Formula,
            v => {
                let nu = quantity(v, Unit::Plain, "model.viscosity", e.line)?;
                if nu < 0.0 {
                    return Err(bad("model.viscosity", e.line, "viscosity must be non-negative"));
                }
                ViscosityPolicy::Constant(nu)
            }
        },
    };
    let flow_rule = [
        r.opt("model.theta1", Unit::Angle)?,
        r.opt("model.theta2", Unit::Angle)?,
        r.opt("model.beta", Unit::Plain)?,
        r.opt("model.ell", Unit::Length)?,
    ];
    let pouliquen = match flow_rule {
        [Some(t1), Some(t2), Some(beta), Some(ell)] => Some(PouliquenParams::new(t1, t2, beta, ell).map_err(|e| {
            ScenarioError::BadValue { key: "model.theta1".into(), line: r.doc.line_of("model.theta1"), reason: e.to_string() }
        })?),
        [None, None, None, None] => None,
        _ => {
            let missing = ["theta1", "theta2", "beta", "ell"]
                .iter()
                .zip(&flow_rule)
                .find(|(_, v)| v.is_none())
                .map(|(k, _)| *k)
                .unwrap_or("theta1");
            return Err(ScenarioError::MissingKey(format!("model.{missing}")));
        }
    };

    // [material]
    let delta0 = r.req("material.delta0", Unit::Angle)?;
    let material = MaterialParams {
        d: r.or("material.d", Unit::Length, 0.001)?,
        rho_star: r.or("material.rho_star", Unit::Plain, 2500.0)?,
        phi_s: r.or("material.phi_s", Unit::Plain, 0.6)?,
        phi_int: r.or("material.phi_int", Unit::Angle, delta0)?,
        delta0,
    };
    material
        .validate()
        .map_err(|e| bad("material.delta0", r.doc.line_of("material.delta0"), e.to_string()))?;

    // [grid]
    let n_entry = r.doc.require("grid.n")?;
    let n: usize = n_entry
        .value
        .parse()
        .map_err(|_| bad("grid.n", n_entry.line, format!("`{}` is not a cell count", n_entry.value)))?;
    if n < 2 {
        return Err(bad("grid.n", n_entry.line, "need at least 2 cells"));
    }
    let x_min = r.req("grid.x_min", Unit::Length)?;
    let x_max = r.req("grid.x_max", Unit::Length)?;
    r.check("grid.x_max", x_min < x_max, "x_min must be below x_max")?;
    let topography = match r.doc.get("grid.topography") {
        None => Topography::Flat,
        Some(e) => parse_topography(&e, base_dir)?,
    };

    // [ic]
    let ic_entry = r.doc.require("ic.profile")?;
    let ic = parse_ic(&ic_entry)?;
    let ic_velocity = r.opt("ic.velocity", Unit::Plain)?;

    // [solver]
    let defaults = SolverConfig::default();
    let h_eps = r.or("solver.h_eps", Unit::Length, defaults.h_eps)?;
    let solver = SolverConfig {
        cfl: r.or("solver.cfl", Unit::Plain, defaults.cfl)?,
        h_eps,
        dt_max: r.or("solver.dt_max", Unit::Time, defaults.dt_max)?,
        t_end: r.or("solver.t_end", Unit::Time, defaults.t_end)?,
        bc: match r.doc.get("solver.bc") {
            None => defaults.bc,
            Some(e) => match e.value.as_str() {
                "periodic" => Boundary::Periodic,
                "reflective" => Boundary::Reflective,
                "open" => Boundary::Open,
                other => return Err(bad("solver.bc", e.line, format!("`{other}` is not periodic, reflective or open"))),
            },
        },
        viscous_scheme: match r.doc.get("solver.viscous") {
            None => defaults.viscous_scheme,
            Some(e) => match e.value.as_str() {
                "implicit" => ViscousScheme::Implicit,
                "off" => ViscousScheme::Off,
                other => return Err(bad("solver.viscous", e.line, format!("`{other}` is not implicit or off"))),
            },
        },
        execution: defaults.execution,
    };
    if let Err(SolverError::InvalidConfig(reason)) = solver.validate() {
        let key = if !(solver.cfl > 0.0 && solver.cfl <= 1.0) {
            "solver.cfl"
        } else if !(solver.h_eps > 0.0) {
            "solver.h_eps"
        } else if !(solver.dt_max > 0.0) {
            "solver.dt_max"
        } else {
            "solver.t_end"
        };
        return Err(bad(key, r.doc.line_of(key), reason));
    }

    // [output]
    let directory = r
        .doc
        .get("output.directory")
        .map_or_else(|| PathBuf::from("out").join(&name), |e| base_dir.join(e.value));
    let interval = r.opt("output.interval", Unit::Time)?;
    if let Some(iv) = interval {
        r.check("output.interval", iv > 0.0, "frame interval must be positive")?;
    }

    doc.reject_unknown()?;

    let model = ModelConfig::savage_hutter(theta, material, k_policy).with_gravity(g).with_dry_depth(h_eps);
    let mut scenario = Scenario {
        name,
        model,
        material,
        pouliquen,
        k_policy,
        chi,
        viscosity,
        grid: GridSpec { n, x_min, x_max },
        topography,
        ic,
        ic_velocity,
        solver,
        output: OutputSpec { directory, interval },
        model_line: model_entry.line,
    };
    scenario.model = scenario.model_config(kind)?;
    if let InitialCondition::SteadyUniform { h0 } = ic {
        let ok = match scenario.model.model {
            models::Model::MuI(mi) => models::steady_froude(h0, theta, &mi.pouliquen).is_ok(),
            models::Model::SavageHutter(_) => false,
        };
        if !ok {
            return Err(ScenarioError::InconsistentModel {
                key: "ic.profile".into(),
                line: ic_entry.line,
                reason: "steady_uniform needs the mu(I) model with theta1 < theta < theta2".into(),
            });
        }
    }
    Ok(scenario)
}

fn parse_topography(e: &Entry, base_dir: &Path) -> Result<Topography> {
    let key = "grid.topography";
    if e.value == "flat" {
        return Ok(Topography::Flat);
    }
    let (name, args) = call(&e.value).ok_or_else(|| bad(key, e.line, "expected flat, step(b0, x0) or table(path)"))?;
    match name {
        "step" => {
            let [b0, x0] = args_of(&args, [Unit::Length, Unit::Length], key, e.line, "step(b0, x0)")?;
            Ok(Topography::Step { b0, x0 })
        }
        "table" => {
            if args.len() != 1 || args[0].is_empty() {
                return Err(bad(key, e.line, "expected table(path)"));
            }
            let path = base_dir.join(args[0]);
            let points = read_bed_table(&path, e.line)?;
            Ok(Topography::Table { path, points })
        }
        other => Err(bad(key, e.line, format!("unknown topography `{other}`"))),
    }
}

fn read_bed_table(path: &Path, line: usize) -> Result<Vec<(f64, f64)>> {
    let file_err = |reason: String| ScenarioError::File { path: path.to_path_buf(), line, reason };
    let text = std::fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, row) in text.lines().enumerate() {
        let row = row.split('#').next().unwrap_or("").trim();
        if row.is_empty() {
            continue;
        }
        let mut cols = row.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(file_err(format!("row {} must have two columns x,b", i + 1)));
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(bed)) if x.is_finite() && bed.is_finite() => {
                if points.last().is_some_and(|p| p.0 >= x) {
                    return Err(file_err(format!("row {}: x must be strictly increasing", i + 1)));
                }
                points.push((x, bed));
            }
            _ if points.is_empty() && i == 0 => {} // header
            _ => return Err(file_err(format!("row {} is not numeric", i + 1))),
        }
    }
    if points.is_empty() {
        return Err(file_err("no data rows".into()));
    }
    Ok(points)
}

fn parse_ic(e: &Entry) -> Result<InitialCondition> {
    let key = "ic.profile";
    let (name, args) = call(&e.value).ok_or_else(|| bad(key, e.line, "expected a profile such as dam_break(h_l, h_r, x0)"))?;
    use Unit::{Length as L, Plain as P};
    let non_negative = |v: f64, what: &str| {
        if v < 0.0 {
            Err(bad(key, e.line, format!("{what} must be non-negative")))
        } else {
            Ok(())
        }
    };
    let ic = match name {
        "dam_break" => {
            let [h_left, h_right, x0] = args_of(&args, [L, L, L], key, e.line, "dam_break(h_l, h_r, x0)")?;
            non_negative(h_left, "h_l")?;
            non_negative(h_right, "h_r")?;
            InitialCondition::DamBreak { h_left, h_right, x0 }
        }
        "uniform" => {
            let [h0, u0] = args_of(&args, [L, P], key, e.line, "uniform(h0, u0)")?;
            non_negative(h0, "h0")?;
            InitialCondition::Uniform { h0, u0 }
        }
        "gaussian_pile" => {
            let [h0, x0, width] = args_of(&args, [L, L, L], key, e.line, "gaussian_pile(h0, x0, sigma)")?;
            non_negative(h0, "h0")?;
            if width <= 0.0 {
                return Err(bad(key, e.line, "pile width must be positive"));
            }
            InitialCondition::GaussianPile { h0, x0, width }
        }
        "lake_at_rest" => {
            let [eta] = args_of(&args, [L], key, e.line, "lake_at_rest(eta)")?;
            InitialCondition::LakeAtRest { eta }
        }
        "steady_uniform" => {
            let [h0] = args_of(&args, [L], key, e.line, "steady_uniform(h0)")?;
            if h0 <= 0.0 {
                return Err(bad(key, e.line, "h0 must be positive"));
            }
            InitialCondition::SteadyUniform { h0 }
        }
        other => return Err(bad(key, e.line, format!("unknown profile `{other}`"))),
    };
    Ok(ic)
}

/// Grid and initial state for a validated scenario.
pub fn build_initial_state(scenario: &Scenario) -> std::result::Result<(Grid1D, SimState), SolverError> {
    let spec = scenario.grid;
    let grid = Grid1D::uniform(spec.n, spec.x_min, spec.x_max)?.with_bed(|x| scenario.topography.elevation(x))?;
    let cfg = &scenario.model;
    let mut h = Vec::with_capacity(grid.n);
    let mut u = Vec::with_capacity(grid.n);
    for (&x, &b) in grid.x.iter().zip(&grid.b) {
        let (hi, ui) = match scenario.ic {
            InitialCondition::DamBreak { h_left, h_right, x0 } => (if x < x0 { h_left } else { h_right }, 0.0),
            InitialCondition::Uniform { h0, u0 } => (h0, u0),
            InitialCondition::GaussianPile { h0, x0, width } => {
                let z = (x - x0) / width;
                (h0 * (-0.5 * z * z).exp(), 0.0)
            }
            InitialCondition::LakeAtRest { eta } => ((eta - b).max(0.0), 0.0),
            InitialCondition::SteadyUniform { h0 } => {
                let fr = match cfg.model {
                    models::Model::MuI(mi) => models::steady_froude(h0, cfg.theta(), &mi.pouliquen)?,
                    models::Model::SavageHutter(_) => {
                        return Err(SolverError::InvalidState("steady_uniform needs the mu(I) model".into()))
                    }
                };
                (h0, fr * (cfg.g * h0 * cfg.cos_theta()).sqrt())
            }
        };
        h.push(hi);
        u.push(scenario.ic_velocity.unwrap_or(ui));
    }
    let hu = h
        .iter()
        .zip(&u)
        .map(|(&hi, &ui)| if models::is_dry(hi, cfg) { 0.0 } else { hi * ui })
        .collect();
    Ok((grid, SimState::new(0.0, h, hu)))
}
