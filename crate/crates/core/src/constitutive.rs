//! Closure laws for dense dry granular material.
//!
//! Everything here is a pure function of its arguments: strain-rate
//! kinematics, the inertial number, the two friction laws (in terms of the
//! inertial number and in terms of the Froude number and depth), the
//! Bagnold mean velocity, the Savage-Hutter earth-pressure coefficients and
//! the depth-averaged viscosity coefficient.
//!
//! Angles are radians throughout. Lengths are metres, times are seconds.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstitutiveError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("pressure must be positive, got {0} Pa")]
    NonPositivePressure(f64),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("strain rate has zero norm; the mu(I) stress direction is undefined")]
    DegenerateStrainRate,
    #[error("slope {theta} rad is outside the viscous range ({theta1}, {theta2}]")]
    SlopeOutOfRange { theta: f64, theta1: f64, theta2: f64 },
}

pub type Result<T> = std::result::Result<T, ConstitutiveError>;

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConstitutiveError::InvalidInput(format!("{name} is not finite ({v})")))
    }
}

fn positive_depth(h: f64) -> Result<f64> {
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(ConstitutiveError::InvalidInput(format!("depth must be positive, got {h} m")))
    }
}

/// Grain and contact properties shared by both depth-averaged models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Grain diameter (m).
    pub d: f64,
    /// Intrinsic grain density (kg/m^3).
    pub rho_star: f64,
    /// Solids volume fraction.
    pub phi_s: f64,
    /// Internal friction angle (rad).
    pub phi_int: f64,
    /// Basal friction angle (rad).
    pub delta0: f64,
}

impl MaterialParams {
    pub fn new(d: f64, rho_star: f64, phi_s: f64, phi_int: f64, delta0: f64) -> Result<Self> {
        let m = Self { d, rho_star, phi_s, phi_int, delta0 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ConstitutiveError::InvalidMaterial(msg));
        for (name, v) in [
            ("d", self.d),
            ("rho_star", self.rho_star),
            ("phi_s", self.phi_s),
            ("phi_int", self.phi_int),
            ("delta0", self.delta0),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} is not finite"));
            }
        }
        if self.d <= 0.0 {
            return bad(format!("grain diameter must be positive, got {}", self.d));
        }
        if self.rho_star <= 0.0 {
            return bad(format!("intrinsic density must be positive, got {}", self.rho_star));
        }
        if !(self.phi_s > 0.0 && self.phi_s <= 1.0) {
            return bad(format!("volume fraction must lie in (0, 1], got {}", self.phi_s));
        }
        if self.delta0 < 0.0 {
            return bad(format!("basal friction angle must be non-negative, got {}", self.delta0));
        }
        if self.phi_int < self.delta0 {
            return bad(format!(
                "internal friction angle {} is below basal friction angle {}",
                self.phi_int, self.delta0
            ));
        }
        if self.phi_int >= FRAC_PI_2 {
            return bad(format!("internal friction angle must be below pi/2, got {}", self.phi_int));
        }
        Ok(())
    }

    /// Bulk (partial) density `phi_s * rho_star`.
    pub fn rho(&self) -> f64 {
        self.phi_s * self.rho_star
    }

    /// Coulomb basal friction coefficient `tan(delta0)`.
    pub fn mu_basal(&self) -> f64 {
        self.delta0.tan()
    }
}

/// Parameters of the inclined-plane friction law: the two critical angles,
/// the empirical constant `beta` and the transition length.
///
/// `theta1 == theta2` is accepted: it collapses both friction laws to a
/// constant Coulomb coefficient, which is how the two models are made to
/// coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PouliquenParams {
    pub theta1: f64,
    pub theta2: f64,
    pub beta: f64,
    /// Transition length (m).
    pub ell: f64,
}

impl PouliquenParams {
    pub fn new(theta1: f64, theta2: f64, beta: f64, ell: f64) -> Result<Self> {
        let p = Self { theta1, theta2, beta, ell };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ConstitutiveError::InvalidInput(msg));
        if ![self.theta1, self.theta2, self.beta, self.ell].iter().all(|v| v.is_finite()) {
            return bad("friction-law parameters must be finite".into());
        }
        if !(self.theta1 > 0.0 && self.theta1 <= self.theta2 && self.theta2 < FRAC_PI_2) {
            return bad(format!(
                "critical angles must satisfy 0 < theta1 <= theta2 < pi/2, got {} and {}",
                self.theta1, self.theta2
            ));
        }
        if self.beta <= 0.0 {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if self.ell <= 0.0 {
            return bad(format!("transition length must be positive, got {}", self.ell));
        }
        Ok(())
    }

    pub fn mu1(&self) -> f64 {
        self.theta1.tan()
    }

    pub fn mu2(&self) -> f64 {
        self.theta2.tan()
    }
}

/// Symmetric 2x2 tensor in the (x, z) plane. Only the three independent
/// components are stored; `zx` is `xz` by construction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor2 {
    pub dxx: f64,
    pub dxz: f64,
    pub dzz: f64,
}

impl SymTensor2 {
    pub const ZERO: Self = Self { dxx: 0.0, dxz: 0.0, dzz: 0.0 };

    pub fn new(dxx: f64, dxz: f64, dzz: f64) -> Self {
        Self { dxx, dxz, dzz }
    }

    pub fn trace(&self) -> f64 {
        self.dxx + self.dzz
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { dxx: c * self.dxx, dxz: c * self.dxz, dzz: c * self.dzz }
    }
}

/// Symmetric part of a velocity gradient, `grad[i][j] = d u_i / d x_j`
/// with index 0 = x and 1 = z.
pub fn strain_rate(grad: [[f64; 2]; 2]) -> Result<SymTensor2> {
    for row in &grad {
        for &v in row {
            finite("velocity gradient entry", v)?;
        }
    }
    Ok(SymTensor2 {
        dxx: grad[0][0],
        dxz: 0.5 * (grad[0][1] + grad[1][0]),
        dzz: grad[1][1],
    })
}

/// `sqrt(tr(D^2) / 2)`.
pub fn second_invariant(d: &SymTensor2) -> f64 {
    (0.5 * (d.dxx * d.dxx + d.dzz * d.dzz) + d.dxz * d.dxz).sqrt()
}

/// Inertial number `2 |D| d / sqrt(p / rho_star)`.
pub fn inertial_number(d_norm: f64, p: f64, mat: &MaterialParams) -> Result<f64> {
    finite("strain-rate norm", d_norm)?;
    finite("pressure", p)?;
    if p <= 0.0 {
        return Err(ConstitutiveError::NonPositivePressure(p));
    }
    if d_norm < 0.0 {
        return Err(ConstitutiveError::InvalidInput(format!(
            "strain-rate norm must be non-negative, got {d_norm}"
        )));
    }
    Ok(2.0 * d_norm * mat.d / (p / mat.rho_star).sqrt())
}

/// Friction coefficient as a function of the inertial number,
/// `mu1 + (mu2 - mu1) / (I0 / I + 1)`, extended by continuity to `mu1` at
/// `I = 0`.
pub fn mu_of_i(i: f64, mu1: f64, mu2: f64, i0: f64) -> Result<f64> {
    finite("inertial number", i)?;
    finite("mu1", mu1)?;
    finite("mu2", mu2)?;
    if i < 0.0 {
        return Err(ConstitutiveError::InvalidInput(format!(
            "inertial number must be non-negative, got {i}"
        )));
    }
    if !(i0 > 0.0 && i0.is_finite()) {
        return Err(ConstitutiveError::InvalidInput(format!("I0 must be positive, got {i0}")));
    }
    if mu1 > mu2 {
        return Err(ConstitutiveError::InvalidInput(format!("mu1 = {mu1} exceeds mu2 = {mu2}")));
    }
    // I / (I0 + I) == 1 / (I0/I + 1), and is well defined at I = 0.
    Ok(mu1 + (mu2 - mu1) * (i / (i0 + i)))
}

/// Basal friction as a function of Froude number and depth,
/// `mu1 + (mu2 - mu1) / (beta h / (ell Fr) + 1)`.
///
/// The empirical law is only strictly valid above `Fr = beta`; below it the
/// same expression is used, with the continuous limit `mu1` at `Fr = 0`.
pub fn mu_basal(fr: f64, h: f64, params: &PouliquenParams) -> Result<f64> {
    positive_depth(h)?;
    finite("Froude number", fr)?;
    if fr < 0.0 {
        return Err(ConstitutiveError::InvalidInput(format!(
            "Froude number must be non-negative, got {fr}"
        )));
    }
    let scaled = params.ell * fr;
    Ok(params.mu1() + (params.mu2() - params.mu1()) * (scaled / (params.beta * h + scaled)))
}

/// `|u| / sqrt(g h cos(theta))`. The magnitude is returned; direction is
/// carried separately by the sign of the velocity.
pub fn froude(u_bar: f64, h: f64, theta: f64, g: f64) -> Result<f64> {
    positive_depth(h)?;
    finite("velocity", u_bar)?;
    Ok(u_bar.abs() / (g * h * theta.cos()).sqrt())
}

/// Depth-averaged velocity of the steady Bagnold profile,
/// `(2 I / 5 d) sqrt(g h cos(theta)) h^{3/2}`.
pub fn bagnold_mean_velocity(
    i: f64,
    h: f64,
    theta: f64,
    mat: &MaterialParams,
    g: f64,
) -> Result<f64> {
    positive_depth(h)?;
    finite("inertial number", i)?;
    if i < 0.0 {
        return Err(ConstitutiveError::InvalidInput(format!(
            "inertial number must be non-negative, got {i}"
        )));
    }
    Ok(2.0 * i / (5.0 * mat.d) * (g * h * theta.cos()).sqrt() * h.powf(1.5))
}

/// The constant `I0 = 5 beta d / (2 sqrt(h) ell)` that makes `mu_of_i` and
/// `mu_basal` agree along the Bagnold profile.
pub fn i_zero(h: f64, mat: &MaterialParams, params: &PouliquenParams) -> Result<f64> {
    positive_depth(h)?;
    Ok(5.0 * params.beta * mat.d / (2.0 * h.sqrt() * params.ell))
}

/// Which earth-pressure state applies: active under extension
/// (`du/dx > 0`), passive under compression (`du/dx < 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureState {
    Active,
    Passive,
}

impl PressureState {
    /// `+1` selects the active state, `-1` the passive one.
    pub fn from_sign(sign: i8) -> Result<Self> {
        match sign {
            1 => Ok(Self::Active),
            -1 => Ok(Self::Passive),
            s => Err(ConstitutiveError::InvalidInput(format!("strain sign must be +1 or -1, got {s}"))),
        }
    }

    /// State for a velocity divergence; a vanishing divergence is treated
    /// as active.
    pub fn from_divergence(dudx: f64) -> Self {
        if dudx < 0.0 {
            Self::Passive
        } else {
            Self::Active
        }
    }
}

/// Form of the earth-pressure coefficient.
///
/// `Printed` is `(2/cos^2 phi)(1 -+ (1 - cos^2 phi / cos^2 delta)) - 1`.
/// `Sqrt` puts a square root around the inner bracket, which is the form
/// usually quoted for the Savage-Hutter closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KConvention {
    #[default]
    Printed,
    Sqrt,
}

pub fn earth_pressure_k(
    state: PressureState,
    mat: &MaterialParams,
    convention: KConvention,
) -> Result<f64> {
    if mat.phi_int < mat.delta0 {
        return Err(ConstitutiveError::InvalidMaterial(format!(
            "internal friction angle {} is below basal friction angle {}",
            mat.phi_int, mat.delta0
        )));
    }
    let cos2_phi = mat.phi_int.cos().powi(2);
    let cos2_delta = mat.delta0.cos().powi(2);
    // Non-negative because delta0 <= phi_int < pi/2; clamp rounding only.
    let radicand = (1.0 - cos2_phi / cos2_delta).max(0.0);
    let inner = match convention {
        KConvention::Printed => radicand,
        KConvention::Sqrt => radicand.sqrt(),
    };
    let bracket = match state {
        PressureState::Active => 1.0 - inner,
        PressureState::Passive => 1.0 + inner,
    };
    Ok(2.0 / cos2_phi * bracket - 1.0)
}

/// Deviatoric stress of the mu(I) law, `mu(I) p D / |D|`.
pub fn mu_i_stress(
    p: f64,
    d: &SymTensor2,
    i0: f64,
    mu1: f64,
    mu2: f64,
    mat: &MaterialParams,
) -> Result<SymTensor2> {
    finite("pressure", p)?;
    if p <= 0.0 {
        return Err(ConstitutiveError::NonPositivePressure(p));
    }
    let norm = second_invariant(d);
    if !norm.is_finite() {
        return Err(ConstitutiveError::InvalidInput("strain rate is not finite".into()));
    }
    if norm == 0.0 {
        return Err(ConstitutiveError::DegenerateStrainRate);
    }
    let i = inertial_number(norm, p, mat)?;
    let mu = mu_of_i(i, mu1, mu2, i0)?;
    Ok(d.scale(mu * p / norm))
}

/// Depth-averaged viscosity coefficient
/// `(2/9)(ell sqrt(g) / beta)(sin theta / sqrt(cos theta))
///  (tan theta2 - tan theta) / (tan theta - tan theta1)`.
///
/// Defined for `theta1 < theta <= theta2`; it vanishes at `theta2`, blows up
/// at `theta1` and turns negative past `theta2`.
pub fn nu_viscosity(theta: f64, params: &PouliquenParams, g: f64) -> Result<f64> {
    finite("slope angle", theta)?;
    if theta <= params.theta1 || theta > params.theta2 {
        return Err(ConstitutiveError::SlopeOutOfRange {
            theta,
            theta1: params.theta1,
            theta2: params.theta2,
        });
    }
    let t = theta.tan();
    let ratio = (params.mu2() - t) / (t - params.mu1());
    Ok(2.0 / 9.0 * params.ell * g.sqrt() / params.beta * theta.sin() / theta.cos().sqrt() * ratio)
}
