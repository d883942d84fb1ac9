//! The two depth-averaged systems as cell-local functions: physical flux,
//! gravity/topography/friction sources, yield threshold and characteristic
//! speeds.
//!
//! Sign convention: `x` points down the reference incline, so gravity drives
//! flow towards `+x` with acceleration `g sin(theta)`.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::constitutive::{
    self, ConstitutiveError, KConvention, MaterialParams, PouliquenParams, PressureState,
};

/// Depth below which a cell is dry (m).
pub const DEFAULT_DRY_DEPTH: f64 = 1e-8;
pub const DEFAULT_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Constitutive(#[from] ConstitutiveError),
}

/// Earth-pressure coefficient used by the Savage-Hutter model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KPolicy {
    Constant(f64),
    /// Active or passive value chosen from the sign of `du/dx`.
    ActivePassive(KConvention),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViscosityPolicy {
    /// Coefficient from the slope and the friction-law parameters.
    Formula,
    Constant(f64),
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SavageHutterParams {
    pub material: MaterialParams,
    pub k: KPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuIParams {
    /// Shape factor: 1 for plug flow, 5/4 for the Bagnold profile.
    pub chi: f64,
    pub pouliquen: PouliquenParams,
    pub viscosity: ViscosityPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    SavageHutter(SavageHutterParams),
    MuI(MuIParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    SavageHutter,
    MuI,
}

impl ModelKind {
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::SavageHutter => "savage_hutter",
            ModelKind::MuI => "mu_i",
        }
    }
}

/// Model choice plus the parameters shared by both models. The incline
/// angle is set at construction so its sine and cosine are computed once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    theta: f64,
    cos_theta: f64,
    sin_theta: f64,
    pub g: f64,
    /// Dry threshold (m).
    pub h_eps: f64,
    pub model: Model,
}

impl ModelConfig {
    /// `theta` is the reference incline angle (rad).
    pub fn new(theta: f64, model: Model) -> Self {
        Self {
            theta,
            cos_theta: theta.cos(),
            sin_theta: theta.sin(),
            g: DEFAULT_GRAVITY,
            h_eps: DEFAULT_DRY_DEPTH,
            model,
        }
    }

    pub fn savage_hutter(theta: f64, material: MaterialParams, k: KPolicy) -> Self {
        Self::new(theta, Model::SavageHutter(SavageHutterParams { material, k }))
    }

    pub fn mu_i(theta: f64, pouliquen: PouliquenParams, chi: f64, viscosity: ViscosityPolicy) -> Self {
        Self::new(theta, Model::MuI(MuIParams { chi, pouliquen, viscosity }))
    }

    pub fn with_gravity(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_dry_depth(mut self, h_eps: f64) -> Self {
        self.h_eps = h_eps;
        self
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    /// Reference incline angle (rad).
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn kind(&self) -> ModelKind {
        match self.model {
            Model::SavageHutter(_) => ModelKind::SavageHutter,
            Model::MuI(_) => ModelKind::MuI,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(ModelError::Invalid(format!("gravity must be positive, got {}", self.g)));
        }
        if !(self.theta >= 0.0 && self.theta < FRAC_PI_2) {
            return Err(ModelError::Invalid(format!(
                "incline angle must lie in [0, pi/2), got {}",
                self.theta
            )));
        }
        if !(self.h_eps > 0.0 && self.h_eps.is_finite()) {
            return Err(ModelError::Invalid(format!("dry threshold must be positive, got {}", self.h_eps)));
        }
        match &self.model {
            Model::SavageHutter(sh) => {
                sh.material.validate()?;
                if let KPolicy::Constant(k) = sh.k {
                    if !(k > 0.0 && k.is_finite()) {
                        return Err(ModelError::Invalid(format!("K must be positive, got {k}")));
                    }
                }
            }
            Model::MuI(mi) => {
                mi.pouliquen.validate()?;
                if !(mi.chi >= 1.0 && mi.chi.is_finite()) {
                    return Err(ModelError::Invalid(format!("shape factor must be >= 1, got {}", mi.chi)));
                }
                match mi.viscosity {
                    ViscosityPolicy::Formula => {
                        constitutive::nu_viscosity(self.theta, &mi.pouliquen, self.g)?;
                    }
                    ViscosityPolicy::Constant(nu) if !(nu >= 0.0 && nu.is_finite()) => {
                        return Err(ModelError::Invalid(format!("viscosity must be non-negative, got {nu}")));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn cos_theta(&self) -> f64 {
        self.cos_theta
    }

    pub fn sin_theta(&self) -> f64 {
        self.sin_theta
    }

    /// Friction coefficient of the arrested state: `tan(delta0)` for
    /// Savage-Hutter, `mu1` for mu(I).
    pub fn static_friction(&self) -> f64 {
        match &self.model {
            Model::SavageHutter(sh) => sh.material.mu_basal(),
            Model::MuI(mi) => mi.pouliquen.mu1(),
        }
    }

    /// Viscosity coefficient, or `None` when the viscous term is inactive.
    pub fn viscosity(&self) -> Result<Option<f64>, ModelError> {
        match &self.model {
            Model::SavageHutter(_) => Ok(None),
            Model::MuI(mi) => match mi.viscosity {
                ViscosityPolicy::Off => Ok(None),
                ViscosityPolicy::Constant(nu) => Ok(Some(nu)),
                ViscosityPolicy::Formula => {
                    Ok(Some(constitutive::nu_viscosity(self.theta, &mi.pouliquen, self.g)?))
                }
            },
        }
    }

    /// Earth-pressure coefficient for a cell with the given velocity
    /// divergence. Always 1 for the mu(I) model.
    pub fn earth_pressure(&self, dudx: f64) -> Result<f64, ModelError> {
        match &self.model {
            Model::SavageHutter(sh) => match sh.k {
                KPolicy::Constant(k) => Ok(k),
                KPolicy::ActivePassive(conv) => Ok(constitutive::earth_pressure_k(
                    PressureState::from_divergence(dudx),
                    &sh.material,
                    conv,
                )?),
            },
            Model::MuI(_) => Ok(1.0),
        }
    }

    /// True when `K` does not depend on the flow.
    pub fn has_constant_k(&self) -> bool {
        !matches!(
            self.model,
            Model::SavageHutter(SavageHutterParams { k: KPolicy::ActivePassive(_), .. })
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FluxVector {
    pub f_h: f64,
    pub f_hu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SourceResult {
    pub s_hu: f64,
    /// The Coulomb threshold holds this cell at rest.
    pub held_static: bool,
}

pub fn is_dry(h: f64, cfg: &ModelConfig) -> bool {
    h < cfg.h_eps
}

/// Depth-averaged velocity; zero in dry cells.
pub fn velocity(h: f64, hu: f64, cfg: &ModelConfig) -> f64 {
    if is_dry(h, cfg) {
        0.0
    } else {
        hu / h
    }
}

/// Hydrostatic part of the momentum flux, `g cos(theta) h^2 K / 2`.
pub fn pressure(h: f64, k: f64, cfg: &ModelConfig) -> f64 {
    0.5 * cfg.g * cfg.cos_theta * h * h * k
}

pub fn flux_sh(h: f64, hu: f64, k: f64, cfg: &ModelConfig) -> FluxVector {
    if is_dry(h, cfg) {
        return FluxVector::default();
    }
    let u = hu / h;
    FluxVector { f_h: hu, f_hu: hu * u + pressure(h, k, cfg) }
}

pub fn flux_mui(h: f64, hu: f64, cfg: &ModelConfig) -> FluxVector {
    if is_dry(h, cfg) {
        return FluxVector::default();
    }
    let chi = match &cfg.model {
        Model::MuI(mi) => mi.chi,
        Model::SavageHutter(_) => 1.0,
    };
    let u = hu / h;
    FluxVector { f_h: hu, f_hu: chi * hu * u + pressure(h, 1.0, cfg) }
}

/// Physical flux of whichever model `cfg` selects. `k` is ignored by mu(I).
pub fn flux(h: f64, hu: f64, k: f64, cfg: &ModelConfig) -> FluxVector {
    match cfg.model {
        Model::SavageHutter(_) => flux_sh(h, hu, k, cfg),
        Model::MuI(_) => flux_mui(h, hu, cfg),
    }
}

/// Yield threshold `g h cos(theta) mu_s` with `mu_s` the arrested-state
/// friction (`tan delta0` or `mu1`).
pub fn yield_threshold(h: f64, cfg: &ModelConfig) -> f64 {
    friction_force(h, cfg.static_friction(), cfg)
}

fn friction_force(h: f64, mu: f64, cfg: &ModelConfig) -> f64 {
    cfg.g * h * cfg.cos_theta * mu
}

/// Gravity and topography forcing `-g h (cos(theta) db/dx - sin(theta))`.
pub fn driving_force(h: f64, db_dx: f64, cfg: &ModelConfig) -> f64 {
    -cfg.g * h * (cfg.cos_theta * db_dx - cfg.sin_theta)
}

/// Whether a motionless cell stays put under the given net driving force.
pub fn holds(h: f64, driving: f64, cfg: &ModelConfig) -> bool {
    driving.abs() < yield_threshold(h, cfg)
}

/// Basal friction coefficient of a moving cell.
pub fn dynamic_friction(h: f64, hu: f64, cfg: &ModelConfig) -> f64 {
    match &cfg.model {
        Model::SavageHutter(sh) => sh.material.mu_basal(),
        Model::MuI(mi) => {
            let u = velocity(h, hu, cfg);
            if u == 0.0 || is_dry(h, cfg) {
                return mi.pouliquen.mu1();
            }
            // h > 0 and u finite, so neither call can fail.
            // Same expression as `constitutive::froude`, with the cached cosine.
            let fr = u.abs() / (cfg.g * h * cfg.cos_theta).sqrt();
            constitutive::mu_basal(fr, h, &mi.pouliquen).unwrap_or(mi.pouliquen.mu1())
        }
    }
}

fn coulomb_source(h: f64, hu: f64, driving: f64, cfg: &ModelConfig) -> SourceResult {
    if is_dry(h, cfg) {
        return SourceResult::default();
    }
    let u = hu / h;
    if u == 0.0 {
        if holds(h, driving, cfg) {
            return SourceResult { s_hu: 0.0, held_static: true };
        }
        // Incipient motion: friction saturates against the driving force.
        let s = driving - yield_threshold(h, cfg) * driving.signum();
        return SourceResult { s_hu: s, held_static: false };
    }
    let mu = dynamic_friction(h, hu, cfg);
    SourceResult { s_hu: driving - friction_force(h, mu, cfg) * u.signum(), held_static: false }
}

/// Savage-Hutter momentum source: gravity, topography and Coulomb friction
/// with the `tan(delta0)` threshold.
pub fn source_sh(h: f64, hu: f64, db_dx: f64, cfg: &ModelConfig) -> SourceResult {
    coulomb_source(h, hu, driving_force(h, db_dx, cfg), cfg)
}

/// mu(I) momentum source: gravity, topography and the rate-dependent basal
/// friction. Motionless cells use the `mu1` threshold.
pub fn source_mui(h: f64, hu: f64, db_dx: f64, cfg: &ModelConfig) -> SourceResult {
    coulomb_source(h, hu, driving_force(h, db_dx, cfg), cfg)
}

pub fn source(h: f64, hu: f64, db_dx: f64, cfg: &ModelConfig) -> SourceResult {
    match cfg.model {
        Model::SavageHutter(_) => source_sh(h, hu, db_dx, cfg),
        Model::MuI(_) => source_mui(h, hu, db_dx, cfg),
    }
}

/// Froude number of steady uniform flow on a flat bed: the root of
/// `mu_basal(Fr, h) = tan(theta)`. Requires `theta1 < theta < theta2`.
pub fn steady_froude(h: f64, theta: f64, params: &PouliquenParams) -> Result<f64, ModelError> {
    if !(h > 0.0) {
        return Err(ModelError::Invalid(format!("depth must be positive, got {h}")));
    }
    if !(theta > params.theta1 && theta < params.theta2) {
        return Err(ModelError::Invalid(format!(
            "steady flow needs theta1 < theta < theta2, got theta = {theta}"
        )));
    }
    let t = theta.tan();
    Ok(params.beta * h / params.ell * (t - params.mu1()) / (params.mu2() - t))
}

/// Characteristic speeds `(lambda_min, lambda_max)` of the convective
/// system. For mu(I) with `chi > 1` these are the exact eigenvalues
/// `chi u +- sqrt(chi (chi - 1) u^2 + g cos(theta) h)`, which reduce to
/// `u +- sqrt(g cos(theta) h)` at `chi = 1`.
pub fn wave_speeds(h: f64, hu: f64, k: f64, cfg: &ModelConfig) -> (f64, f64) {
    if is_dry(h, cfg) {
        return (0.0, 0.0);
    }
    let u = hu / h;
    match &cfg.model {
        Model::SavageHutter(_) => {
            let c = (cfg.g * cfg.cos_theta * k * h).sqrt();
            (u - c, u + c)
        }
        Model::MuI(mi) => {
            let chi = mi.chi;
            let c = (chi * (chi - 1.0) * u * u + cfg.g * cfg.cos_theta * h).sqrt();
            let adv = chi * u;
            (adv - c, adv + c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn deg(a: f64) -> f64 {
        a.to_radians()
    }

    fn sh(theta: f64, delta0: f64, k: f64) -> ModelConfig {
        let m = MaterialParams::new(0.001, 2500.0, 0.6, delta0.max(deg(35.0)), delta0).unwrap();
        ModelConfig::savage_hutter(theta, m, KPolicy::Constant(k))
    }

    fn mui(theta: f64, chi: f64) -> ModelConfig {
        let p = PouliquenParams::new(deg(21.0), deg(31.0), 0.136, 0.001).unwrap();
        ModelConfig::mu_i(theta, p, chi, ViscosityPolicy::Off)
    }

    #[test]
    fn flux_examples() {
        let c = sh(0.0, deg(30.0), 1.0);
        assert_eq!(flux_sh(0.0, 0.0, 1.0, &c), FluxVector::default());
        assert_relative_eq!(flux_sh(1.0, 0.0, 1.0, &c).f_hu, 4.905, max_relative = 1e-15);
        let f = flux_sh(1.0, 2.0, 1.0, &c);
        assert_eq!(f.f_h, 2.0);
        assert_relative_eq!(f.f_hu, 8.905, max_relative = 1e-15);

        let m = mui(0.0, 1.25);
        let f = flux_mui(1.0, 2.0, &m);
        assert_eq!(f.f_h, 2.0);
        assert_relative_eq!(f.f_hu, 9.905, max_relative = 1e-15);
        assert_eq!(flux_mui(0.0, 0.0, &m), FluxVector::default());

        let m1 = mui(0.3, 1.0);
        let s1 = m1.with_model(sh(0.3, 0.2, 1.0).model);
        for (h, hu) in [(0.7, -0.3), (1e-3, 2e-4), (2.0, 5.0)] {
            assert_eq!(flux_mui(h, hu, &m1), flux_sh(h, hu, 1.0, &s1));
        }
    }

    #[test]
    fn yield_threshold_examples() {
        let c = sh(0.0, deg(30.0), 1.0);
        assert_eq!(yield_threshold(0.0, &c), 0.0);
        assert_relative_eq!(yield_threshold(1.0, &c), 5.6638061407502285, max_relative = 1e-12);
        assert_relative_eq!(yield_threshold(3.0, &c), 3.0 * yield_threshold(1.0, &c), max_relative = 1e-15);
    }

    #[test]
    fn source_sh_examples() {
        let c = sh(deg(10.0), deg(30.0), 1.0);
        let r = source_sh(0.5, 0.0, 0.0, &c);
        assert!(r.held_static);
        assert_eq!(r.s_hu, 0.0);

        let c = sh(deg(30.0), deg(20.0), 1.0);
        let fwd = source_sh(1.0, 0.5, 0.0, &c);
        assert!(!fwd.held_static);
        assert_relative_eq!(fwd.s_hu, 1.812814728169175, max_relative = 1e-12);
        let back = source_sh(1.0, -0.5, 0.0, &c);
        let gravity = driving_force(1.0, 0.0, &c);
        assert_relative_eq!(back.s_hu - gravity, -(fwd.s_hu - gravity), max_relative = 1e-14);
    }

    #[test]
    fn source_mui_examples() {
        let theta = deg(26.0);
        let c = mui(theta, 1.0);
        let Model::MuI(mi) = c.model else { unreachable!() };
        for h in [0.005, 0.01, 0.05] {
            let fr = steady_froude(h, theta, &mi.pouliquen).unwrap();
            let u = fr * (c.g * h * theta.cos()).sqrt();
            let r = source_mui(h, h * u, 0.0, &c);
            assert!(r.s_hu.abs() < 1e-12, "steady residual {} at h = {h}", r.s_hu);
        }
        let drive0 = driving_force(0.02, 0.0, &c);
        assert_relative_eq!(
            driving_force(0.02, 0.3, &c) - drive0,
            3.0 * (driving_force(0.02, 0.1, &c) - drive0),
            max_relative = 1e-12
        );

        let held = source_mui(0.02, 0.0, 0.0, &mui(deg(15.0), 1.0));
        assert!(held.held_static);
        assert_eq!(held.s_hu, 0.0);
    }

    #[test]
    fn wave_speed_examples() {
        let c = sh(0.0, deg(30.0), 1.0);
        let (lo, hi) = wave_speeds(1.0, 0.0, 1.0, &c);
        assert_relative_eq!(hi, 3.132091952673165, max_relative = 1e-14);
        assert_relative_eq!(lo, -3.132091952673165, max_relative = 1e-14);
        assert_eq!(wave_speeds(0.0, 0.0, 1.0, &c), (0.0, 0.0));
        let (_, hi4) = wave_speeds(1.0, 0.0, 4.0, &c);
        assert_relative_eq!(hi4, 2.0 * hi, max_relative = 1e-14);
    }

    #[test]
    fn bagnold_shape_factor_widens_speeds() {
        let plug = mui(0.2, 1.0);
        let bag = mui(0.2, 1.25);
        let (_, hi1) = wave_speeds(0.1, 0.2, 1.0, &plug);
        let (lo2, hi2) = wave_speeds(0.1, 0.2, 1.0, &bag);
        assert!(hi2 > hi1);
        // Product of the eigenvalues is det(J) = chi u^2 - g cos(theta) h.
        let (u, c2) = (2.0, 0.1 * bag.g * 0.2f64.cos());
        assert_relative_eq!(lo2 * hi2, 1.25 * u * u - c2, max_relative = 1e-12);
    }

    #[test]
    fn config_validation() {
        let p = PouliquenParams::new(deg(21.0), deg(31.0), 0.136, 0.001).unwrap();
        assert!(ModelConfig::mu_i(deg(35.0), p, 1.0, ViscosityPolicy::Formula).validate().is_err());
        assert!(ModelConfig::mu_i(deg(26.0), p, 1.0, ViscosityPolicy::Formula).validate().is_ok());
        assert!(ModelConfig::mu_i(deg(35.0), p, 1.0, ViscosityPolicy::Off).validate().is_ok());
        assert!(ModelConfig::mu_i(deg(26.0), p, 0.9, ViscosityPolicy::Off).validate().is_err());
        assert!(sh(0.0, 0.3, -1.0).validate().is_err());
        assert!(sh(FRAC_PI_2, 0.3, 1.0).validate().is_err());
    }
}
