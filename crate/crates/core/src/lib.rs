//! Depth-averaged dry granular flow in one dimension.
//!
//! Two models share one finite-volume solver: the Savage-Hutter model, with
//! Coulomb basal friction and an earth-pressure coefficient, and the
//! depth-averaged mu(I) model, with rate-dependent basal friction and a
//! `h^{3/2}` viscous term.
//!
//! - [`constitutive`]: closure laws (inertial number, friction laws,
//!   earth-pressure coefficients, viscosity coefficient).
//! - [`models`]: fluxes, sources and wave speeds of the two systems.
//! - [`solver`]: grid, state and the time stepper.
//! - [`scenario`], [`output`], [`app`]: configuration files, CSV output and
//!   the `run` / `compare` drivers used by the CLI.
//! - [`verify`]: the verification suites behind `avalanche verify`.

pub mod app;
pub mod constitutive;
pub mod exec;
pub mod models;
pub mod output;
pub mod scenario;
pub mod solver;
pub mod tridiag;
pub mod verify;

pub use exec::Execution;
pub use models::{ModelConfig, ModelKind};
pub use solver::{Grid1D, SimState, SolverConfig};
