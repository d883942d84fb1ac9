//! Diagnostics and CSV output.
//!
//! Numbers are written in Rust's shortest round-trip scientific notation
//! (`{:e}`), so every value read back parses to the same `f64`. Negative
//! zero is written as `0e0`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::solver::{Grid1D, SimState};

pub const FIELDS_FILE: &str = "fields.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const COMPARE_FILE: &str = "compare.csv";

pub const FIELDS_HEADER: &str = "t,x,h,u,b";
pub const DIAGNOSTICS_HEADER: &str = "t,mass,momentum,front_x,max_speed,dt";
pub const COMPARE_HEADER: &str = "t,front_x_sh,front_x_mui,max_speed_sh,max_speed_mui";

/// Written in place of `front_x` when every cell is dry.
pub const NO_FRONT: &str = "none";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("frame times differ: {0} s and {1} s")]
    Misaligned(f64, f64),
}

pub type Result<T> = std::result::Result<T, OutputError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    /// Sum of h dx (m^2).
    pub mass: f64,
    /// Sum of hu dx (m^3/s).
    pub momentum: f64,
    /// Centre of the rightmost wet cell, `None` when the domain is dry.
    pub front_x: Option<f64>,
    /// Largest |u| over wet cells (m/s).
    pub max_speed: f64,
    /// The step that produced this state, 0 for the initial frame.
    pub dt: f64,
}

/// Diagnostics of `state`. Sums run left to right so the result does not
/// depend on the execution mode.
pub fn compute_diagnostics(state: &SimState, grid: &Grid1D, h_eps: f64, dt: f64) -> Diagnostics {
    let mass = state.mass(grid.dx);
    let momentum = state.momentum(grid.dx);
    let front_x = state.h.iter().rposition(|&h| h >= h_eps).map(|i| grid.x[i]);
    let max_speed = state
        .h
        .iter()
        .zip(&state.hu)
        .filter(|(&h, _)| h >= h_eps)
        .map(|(&h, &hu)| (hu / h).abs())
        .fold(0.0, f64::max);
    Diagnostics { t: state.t, mass, momentum, front_x, max_speed, dt }
}

/// Formats a value for CSV output.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0e0".to_string()
    } else {
        format!("{v:e}")
    }
}

fn fmt_front(front: Option<f64>) -> String {
    front.map_or_else(|| NO_FRONT.to_string(), fmt_num)
}

/// Depth-averaged velocity as written to `fields.csv`: zero in dry cells.
pub fn output_velocity(h: f64, hu: f64, h_eps: f64) -> f64 {
    if h < h_eps {
        0.0
    } else {
        hu / h
    }
}

struct CsvFile {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvFile {
    fn create(path: PathBuf, header: &str) -> Result<Self> {
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut f = Self { path, out: BufWriter::new(file) };
        f.line(header)?;
        Ok(f)
    }

    fn line(&mut self, row: &str) -> Result<()> {
        writeln!(self.out, "{row}").map_err(io_err(&self.path))
    }

    fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(io_err(&self.path))
    }
}

/// Writes `fields.csv` and `diagnostics.csv` into one output directory.
/// Creating the writer truncates both files; frames are then appended.
pub struct FrameWriter {
    fields: CsvFile,
    diagnostics: CsvFile,
    h_eps: f64,
}

impl FrameWriter {
    pub fn create(dir: &Path, h_eps: f64) -> Result<Self> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Self {
            fields: CsvFile::create(dir.join(FIELDS_FILE), FIELDS_HEADER)?,
            diagnostics: CsvFile::create(dir.join(DIAGNOSTICS_FILE), DIAGNOSTICS_HEADER)?,
            h_eps,
        })
    }

    pub fn write_frame(&mut self, state: &SimState, diag: &Diagnostics, grid: &Grid1D) -> Result<()> {
        let t = fmt_num(state.t);
        for i in 0..state.len() {
            let u = output_velocity(state.h[i], state.hu[i], self.h_eps);
            let row = format!(
                "{t},{},{},{},{}",
                fmt_num(grid.x[i]),
                fmt_num(state.h[i]),
                fmt_num(u),
                fmt_num(grid.b[i])
            );
            self.fields.line(&row)?;
        }
        self.diagnostics.line(&diagnostics_row(diag))
    }

    pub fn finish(mut self) -> Result<()> {
        self.fields.flush()?;
        self.diagnostics.flush()
    }
}

pub fn diagnostics_row(d: &Diagnostics) -> String {
    format!(
        "{},{},{},{},{},{}",
        fmt_num(d.t),
        fmt_num(d.mass),
        fmt_num(d.momentum),
        fmt_front(d.front_x),
        fmt_num(d.max_speed),
        fmt_num(d.dt)
    )
}

/// Writes `compare.csv` from the per-frame diagnostics of both models.
pub fn write_compare(path: &Path, sh: &[Diagnostics], mui: &[Diagnostics]) -> Result<()> {
    let mut rows = Vec::with_capacity(sh.len());
    for (a, b) in sh.iter().zip(mui) {
        if a.t != b.t {
            return Err(OutputError::Misaligned(a.t, b.t));
        }
        rows.push(format!(
            "{},{},{},{},{}",
            fmt_num(a.t),
            fmt_front(a.front_x),
            fmt_front(b.front_x),
            fmt_num(a.max_speed),
            fmt_num(b.max_speed)
        ));
    }
    if sh.len() != mui.len() {
        let (a, b) = (sh.get(rows.len()), mui.get(rows.len()));
        let t = |d: Option<&Diagnostics>| d.map_or(f64::NAN, |d| d.t);
        return Err(OutputError::Misaligned(t(a), t(b)));
    }
    let mut f = CsvFile::create(path.to_path_buf(), COMPARE_HEADER)?;
    for row in &rows {
        f.line(row)?;
    }
    f.flush()
}
