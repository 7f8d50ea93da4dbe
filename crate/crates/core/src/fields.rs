//! Exterior fields of an ideal infinite solenoid.
//!
//! Two models share the A₀ = 0 gauge with A = A_θ(r, t) θ̂:
//!
//! * quasistatic: A_θ = Φ(t)/(2πr), E_θ = −Φ'(t)/(2πr), B_z = 0;
//! * exact sinusoidal: the outgoing cylindrical-wave solution for a surface
//!   current ∝ cos(Ωt), written with J₁, Y₁ (for A, E) and J₀, Y₀ (for B).
//!
//! Both satisfy E_θ = −∂A_θ/∂t and B_z = (1/r)∂(r A_θ)/∂r analytically.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bessel::{j0, j1, y0, y1};
use crate::error::{Error, Result};
use crate::flux::{FluxProfile, Side};

/// Default cut-off for "≪ 1" in the quasistatic validity ratios.
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolenoidConfig {
    pub radius_a: f64,
    pub light_speed_c: f64,
    pub turns_density_n: Option<f64>,
    pub current_amplitude_i0: Option<f64>,
}

impl SolenoidConfig {
    pub fn new(radius_a: f64, light_speed_c: f64) -> Result<Self> {
        let s = SolenoidConfig {
            radius_a,
            light_speed_c,
            turns_density_n: None,
            current_amplitude_i0: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_current(mut self, turns_density_n: f64, current_amplitude_i0: f64) -> Result<Self> {
        self.turns_density_n = Some(turns_density_n);
        self.current_amplitude_i0 = Some(current_amplitude_i0);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius_a > 0.0 && self.radius_a.is_finite()) {
            return Err(Error::invalid(
                "solenoid.radius_a",
                format!("must be finite and > 0, got {}", self.radius_a),
            ));
        }
        if !(self.light_speed_c > 0.0 && self.light_speed_c.is_finite()) {
            return Err(Error::invalid(
                "solenoid.light_speed_c",
                format!("must be finite and > 0, got {}", self.light_speed_c),
            ));
        }
        for (name, v) in [
            ("solenoid.turns_density_n", self.turns_density_n),
            ("solenoid.current_amplitude_I0", self.current_amplitude_i0),
        ] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(Error::invalid(name, format!("must be finite, got {v}")));
                }
            }
        }
        Ok(())
    }

    /// Φ(0) = 4π² n I₀ a² / c, when both current parameters are given.
    pub fn flux_from_current(&self) -> Option<f64> {
        match (self.turns_density_n, self.current_amplitude_i0) {
            (Some(n), Some(i0)) => {
                Some(4.0 * PI * PI * n * i0 * self.radius_a * self.radius_a / self.light_speed_c)
            }
            _ => None,
        }
    }

    pub fn check_exterior(&self, r: f64) -> Result<()> {
        if r > self.radius_a && r.is_finite() {
            Ok(())
        } else {
            Err(Error::ExteriorDomain {
                r,
                radius_a: self.radius_a,
            })
        }
    }

    fn check_flux_consistency(&self, flux: &FluxProfile) -> Result<()> {
        if let Some(from_current) = self.flux_from_current() {
            let phi0 = flux.value(0.0);
            let scale = from_current.abs().max(phi0.abs()).max(f64::MIN_POSITIVE);
            if (from_current - phi0).abs() > 1e-9 * scale {
                return Err(Error::FluxMismatch { from_current, phi0 });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub r: f64,
    pub t: f64,
    pub a_theta: f64,
    pub e_theta: f64,
    pub b_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldModelKind {
    Quasistatic,
    ExactSinusoidal,
}

impl FieldModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldModelKind::Quasistatic => "quasistatic",
            FieldModelKind::ExactSinusoidal => "exact_sinusoidal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "quasistatic" => Some(FieldModelKind::Quasistatic),
            "exact_sinusoidal" => Some(FieldModelKind::ExactSinusoidal),
            _ => None,
        }
    }
}

/// A solenoid, its interior flux history, and the rule that turns them into
/// exterior fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldModel {
    kind: FieldModelKind,
    solenoid: SolenoidConfig,
    flux: FluxProfile,
}

impl FieldModel {
    pub fn new(kind: FieldModelKind, solenoid: SolenoidConfig, flux: FluxProfile) -> Result<Self> {
        match kind {
            FieldModelKind::Quasistatic => Self::quasistatic(solenoid, flux),
            FieldModelKind::ExactSinusoidal => Self::exact_sinusoidal(solenoid, flux),
        }
    }

    pub fn quasistatic(solenoid: SolenoidConfig, flux: FluxProfile) -> Result<Self> {
        solenoid.validate()?;
        flux.validate()?;
        solenoid.check_flux_consistency(&flux)?;
        Ok(FieldModel {
            kind: FieldModelKind::Quasistatic,
            solenoid,
            flux,
        })
    }

    pub fn exact_sinusoidal(solenoid: SolenoidConfig, flux: FluxProfile) -> Result<Self> {
        solenoid.validate()?;
        flux.validate()?;
        match flux {
            FluxProfile::Sinusoidal { omega_drive, .. } if omega_drive > 0.0 => {}
            FluxProfile::Sinusoidal { .. } => {
                return Err(Error::ModelMismatch(
                    "exact_sinusoidal needs a drive frequency > 0".into(),
                ))
            }
            other => {
                return Err(Error::ModelMismatch(format!(
                    "exact_sinusoidal requires a sinusoidal flux profile, got {}",
                    other.kind().as_str()
                )))
            }
        }
        solenoid.check_flux_consistency(&flux)?;
        Ok(FieldModel {
            kind: FieldModelKind::ExactSinusoidal,
            solenoid,
            flux,
        })
    }

    pub fn kind(&self) -> FieldModelKind {
        self.kind
    }

    pub fn solenoid(&self) -> &SolenoidConfig {
        &self.solenoid
    }

    pub fn flux(&self) -> &FluxProfile {
        &self.flux
    }

    /// Field at (r, t). Fails at the jump of a zero-width pulse, where the
    /// quasistatic E field is a delta function; use [`Self::sample_at`].
    pub fn sample(&self, r: f64, t: f64) -> Result<FieldSample> {
        if self.kind == FieldModelKind::Quasistatic {
            self.flux.derivative(t)?;
        }
        self.sample_at(r, t, Side::After)
    }

    /// One-sided field at (r, t).
    pub fn sample_at(&self, r: f64, t: f64, side: Side) -> Result<FieldSample> {
        self.solenoid.check_exterior(r)?;
        Ok(match self.kind {
            FieldModelKind::Quasistatic => quasistatic_fields(&self.flux, r, t, side),
            FieldModelKind::ExactSinusoidal => self.exact_fields(r, t),
        })
    }

    /// A_θ alone, one-sided; cheaper than a full sample for the exact model.
    pub fn a_theta_at(&self, r: f64, t: f64, side: Side) -> Result<f64> {
        self.solenoid.check_exterior(r)?;
        Ok(match self.kind {
            FieldModelKind::Quasistatic => self.flux.value_at(t, side) / (2.0 * PI * r),
            FieldModelKind::ExactSinusoidal => {
                let (pref, k, omega) = self.exact_params();
                let (s, c) = (omega * t).sin_cos();
                pref * (j1(k * r) * s - y1(k * r) * c)
            }
        })
    }

    /// Φ_enc(r, t) = 2πr A_θ(r, t), the flux through the circle of radius r.
    pub fn enclosed_flux(&self, r: f64, t: f64) -> Result<f64> {
        Ok(2.0 * PI * r * self.a_theta_at(r, t, Side::After)?)
    }

    /// Closed-form (1/T) ∫₀ᵀ A_θ(r, t) dt.
    pub fn a_theta_time_average(&self, r: f64, period: f64) -> Result<f64> {
        self.solenoid.check_exterior(r)?;
        match self.kind {
            FieldModelKind::Quasistatic => Ok(self.flux.time_average(period)? / (2.0 * PI * r)),
            FieldModelKind::ExactSinusoidal => {
                if !(period > 0.0) {
                    return Err(Error::Domain {
                        what: "averaging window T",
                        reason: format!("must be > 0, got {period}"),
                    });
                }
                let (pref, k, omega) = self.exact_params();
                let x = omega * period;
                let mean_sin = (1.0 - x.cos()) / x;
                let mean_cos = x.sin() / x;
                Ok(pref * (j1(k * r) * mean_sin - y1(k * r) * mean_cos))
            }
        }
    }

    /// (Φ(0) J₁(ka) / 2a, k, Ω) for the exact model.
    fn exact_params(&self) -> (f64, f64, f64) {
        let (phi0, omega) = match self.flux {
            FluxProfile::Sinusoidal { phi0, omega_drive } => (phi0, omega_drive),
            _ => unreachable!("exact model is only constructed with a sinusoidal flux"),
        };
        let a = self.solenoid.radius_a;
        let k = omega / self.solenoid.light_speed_c;
        (phi0 * j1(k * a) / (2.0 * a), k, omega)
    }

    fn exact_fields(&self, r: f64, t: f64) -> FieldSample {
        let (pref, k, omega) = self.exact_params();
        let (s, c) = (omega * t).sin_cos();
        let kr = k * r;
        let (j1r, y1r) = (j1(kr), y1(kr));
        FieldSample {
            r,
            t,
            a_theta: pref * (j1r * s - y1r * c),
            e_theta: -pref * omega * (j1r * c + y1r * s),
            b_z: pref * k * (j0(kr) * s - y0(kr) * c),
        }
    }
}

fn quasistatic_fields(flux: &FluxProfile, r: f64, t: f64, side: Side) -> FieldSample {
    let two_pi_r = 2.0 * PI * r;
    FieldSample {
        r,
        t,
        a_theta: flux.value_at(t, side) / two_pi_r,
        e_theta: -flux.derivative_at(t, side) / two_pi_r,
        b_z: 0.0,
    }
}

/// Quasistatic gauge fields for a bare flux profile.
pub fn sample_quasistatic(
    solenoid: &SolenoidConfig,
    flux: &FluxProfile,
    r: f64,
    t: f64,
) -> Result<FieldSample> {
    solenoid.check_exterior(r)?;
    flux.derivative(t)?;
    Ok(quasistatic_fields(flux, r, t, Side::After))
}

/// Exact exterior fields of a sinusoidally driven solenoid.
pub fn sample_exact_sinusoidal(
    solenoid: &SolenoidConfig,
    flux: &FluxProfile,
    r: f64,
    t: f64,
) -> Result<FieldSample> {
    FieldModel::exact_sinusoidal(*solenoid, *flux)?.sample(r, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityReport {
    /// Ωa/c
    pub ratio_a: f64,
    /// Ωr/c
    pub ratio_r: f64,
    pub threshold: f64,
    pub ok: bool,
}

/// Light-travel ratios Ωa/c and Ωr/c, both required to sit below `threshold`.
pub fn quasistatic_validity(
    solenoid: &SolenoidConfig,
    omega: f64,
    r: f64,
    threshold: f64,
) -> ValidityReport {
    let ratio_a = omega * solenoid.radius_a / solenoid.light_speed_c;
    let ratio_r = omega * r / solenoid.light_speed_c;
    ValidityReport {
        ratio_a,
        ratio_r,
        threshold,
        ok: ratio_a < threshold && ratio_r < threshold,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxwellResidual {
    /// (1/r)∂(r E_θ)/∂r + ∂B_z/∂t
    pub faraday: f64,
    /// −∂B_z/∂r − (1/c²)∂E_θ/∂t
    pub ampere: f64,
}

/// Central-difference residuals of the two source-free exterior Maxwell
/// equations. The radial step is `h`; the time step is the light-crossing
/// time h/c so both stencils have the same reach.
pub fn maxwell_residual(model: &FieldModel, r: f64, t: f64, h: f64) -> Result<MaxwellResidual> {
    if !(h > 0.0) {
        return Err(Error::invalid("h", format!("must be > 0, got {h}")));
    }
    let solenoid = model.solenoid();
    solenoid.check_exterior(r - h)?;
    let c = solenoid.light_speed_c;
    let tau = h / c;
    let at = |r: f64, t: f64| model.sample_at(r, t, Side::After);

    let outer = at(r + h, t)?;
    let inner = at(r - h, t)?;
    let later = at(r, t + tau)?;
    let earlier = at(r, t - tau)?;

    let curl_e = ((r + h) * outer.e_theta - (r - h) * inner.e_theta) / (2.0 * h * r);
    let db_dt = (later.b_z - earlier.b_z) / (2.0 * tau);
    let db_dr = (outer.b_z - inner.b_z) / (2.0 * h);
    let de_dt = (later.e_theta - earlier.e_theta) / (2.0 * tau);

    Ok(MaxwellResidual {
        faraday: curl_e + db_dt,
        ampere: -db_dr - de_dt / (c * c),
    })
}
